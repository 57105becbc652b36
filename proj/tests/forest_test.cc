// Copyright 2026 The Lanekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lanekit/forest.hpp"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "lanekit/errors.hpp"
#include "lanekit/rng.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

namespace lanekit {
namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
  Dataset d;
  for (std::size_t f = 0; f < x[0].size(); ++f) d.feature_names.push_back("f" + std::to_string(f));
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.push(static_cast<long>(i), static_cast<long>(i),
           y[i] ? Label::lane_change : Label::lane_keep, x[i]);
  }
  return d;
}

/// Forest of single-leaf trees with a chosen number of lane_change votes.
Forest voting_forest(int n_change_votes, int n_trees, std::size_t dim = 3) {
  Forest f;
  for (std::size_t i = 0; i < dim; ++i) f.feature_names.push_back("f" + std::to_string(i));
  f.importances.assign(dim, 1.0 / static_cast<double>(dim));
  for (int t = 0; t < n_trees; ++t) {
    Tree tree;
    TreeNode leaf;
    leaf.leaf = t < n_change_votes ? Label::lane_change : Label::lane_keep;
    tree.nodes.push_back(leaf);
    f.trees.push_back(tree);
  }
  f.config.n_trees = n_trees;
  return f;
}

TEST(Train, TwoSeparableInstancesSplitAtMidpoint) {
  const Dataset data = make_dataset({{1.0, 5.0}, {3.0, 5.0}}, {0, 1});
  TrainConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  cfg.mtry = 2;
  const Forest f = train(data, cfg);
  ASSERT_EQ(f.trees.size(), 1u);
  const Tree& t = f.trees[0];
  ASSERT_EQ(t.nodes.size(), 3u);
  EXPECT_EQ(t.nodes[0].feature, 0);
  EXPECT_DOUBLE_EQ(t.nodes[0].threshold, 2.0);  // midpoint of 1 and 3
  EXPECT_EQ(t.predict(std::vector<double>{0.0, 5.0}), Label::lane_keep);
  EXPECT_EQ(t.predict(std::vector<double>{4.0, 5.0}), Label::lane_change);
}

TEST(Train, IdenticalFeaturesMixedLabelsGiveMajorityLeaf) {
  const Dataset data = make_dataset({{2.0, 2.0}, {2.0, 2.0}, {2.0, 2.0}}, {1, 0, 0});
  TrainConfig cfg;
  cfg.n_trees = 8;
  cfg.bootstrap = false;
  const Forest f = train(data, cfg);
  for (const Tree& t : f.trees) {
    ASSERT_EQ(t.nodes.size(), 1u);
    EXPECT_TRUE(t.nodes[0].is_leaf());
    EXPECT_EQ(t.nodes[0].leaf, Label::lane_keep);
  }
  // Importances fall back to uniform when no split ever happens.
  EXPECT_DOUBLE_EQ(f.importances[0], 0.5);
}

TEST(Train, MajorityTieDefaultsToLaneKeep) {
  const Dataset data = make_dataset({{1.0}, {1.0}}, {0, 1});
  TrainConfig cfg;
  cfg.n_trees = 3;
  cfg.bootstrap = false;
  const Forest f = train(data, cfg);
  for (const Tree& t : f.trees) {
    EXPECT_EQ(t.nodes[0].leaf, Label::lane_keep);
  }
}

TEST(Train, ErrorPaths) {
  TrainConfig cfg;
  EXPECT_THROW(train(make_dataset({{1.0}, {2.0}}, {1, 1}), cfg), ParamError);  // single class
  Dataset bad = make_dataset({{1.0, 2.0}, {2.0, 1.0}}, {0, 1});
  bad.features[1].pop_back();
  EXPECT_THROW(train(bad, cfg), ShapeError);
  Dataset tiny;
  tiny.feature_names = {"f0"};
  tiny.push(0, 0, Label::lane_keep, {1.0});
  EXPECT_THROW(train(tiny, cfg), ParamError);
  cfg.mtry = 7;
  EXPECT_THROW(train(make_dataset({{1.0}, {2.0}}, {0, 1}), cfg), ParamError);
}

TEST(PredictProba, UnanimityAndVoteArithmetic) {
  const std::vector<double> f = {0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(predict_proba(voting_forest(100, 100), f)[1], 1.0);
  const auto p = predict_proba(voting_forest(80, 100), f);
  EXPECT_DOUBLE_EQ(p[1], 0.80);  // 80 of 100 trees vote lane_change
  EXPECT_DOUBLE_EQ(p[0] + p[1], 1.0);
}

TEST(PredictProba, DimensionMismatchThrows) {
  const Forest f = voting_forest(1, 1, 3);
  EXPECT_THROW(predict_proba(f, std::vector<double>{1.0}), ShapeError);
}

TEST(PredictProba, SumsToOneOnRandomInputs) {
  Rng rng(1234);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) {
    x.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    y.push_back(x.back()[0] > 0.5 ? 1 : 0);
  }
  TrainConfig cfg;
  cfg.n_trees = 37;
  cfg.seed = 5;
  const Forest f = train(make_dataset(x, y), cfg);
  const double T = 37.0;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> probe = {rng.uniform(), rng.uniform(), rng.uniform()};
    const auto p = predict_proba(f, probe);
    EXPECT_DOUBLE_EQ(p[0] + p[1], 1.0);
    // Each probability is an exact multiple of 1/T.
    const double votes = p[1] * T;
    EXPECT_DOUBLE_EQ(votes, std::round(votes));
  }
}

TEST(Evaluate, ConfusionLayoutRowsTrueColumnsPredicted) {
  // A forest that always answers lane_change.
  const Forest always_change = voting_forest(5, 5, 2);
  Dataset test;
  test.feature_names = {"f0", "f1"};
  test.push(1, 0, Label::lane_change, {0.0, 0.0});
  test.push(1, 1, Label::lane_keep, {0.0, 0.0});
  test.push(2, 2, Label::lane_keep, {0.0, 0.0});
  const Metrics m = evaluate(always_change, test);
  EXPECT_NEAR(m.accuracy, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(m.confusion[1][1], 1);  // true change predicted change
  EXPECT_EQ(m.confusion[0][1], 2);  // true keep predicted change
  EXPECT_EQ(m.confusion[0][0], 0);
  EXPECT_DOUBLE_EQ(m.recall[1], 1.0);
  EXPECT_NEAR(m.precision[1], 1.0 / 3.0, 1e-12);

  EXPECT_THROW(evaluate(always_change, Dataset{}), ParamError);
}

TEST(Evaluate, PerfectForestScoresOne) {
  Rng rng(10);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) {
    x.push_back({rng.uniform(), rng.uniform()});
    y.push_back(x.back()[0] > 0.5 ? 1 : 0);
  }
  TrainConfig cfg;
  cfg.n_trees = 25;
  cfg.bootstrap = false;
  cfg.seed = 4;
  const Dataset data = make_dataset(x, y);
  EXPECT_DOUBLE_EQ(evaluate(train(data, cfg), data).accuracy, 1.0);
}

TEST(Evaluate, ExactTieGoesToLaneKeep) {
  const Forest f = voting_forest(2, 4, 1);  // p = 0.5 each
  Dataset test;
  test.feature_names = {"f0"};
  test.push(1, 0, Label::lane_keep, {0.0});
  EXPECT_DOUBLE_EQ(evaluate(f, test).accuracy, 1.0);
}

TEST(Importance, SingleInformativeFeatureTakesAll) {
  Rng rng(42);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    const double sig = rng.uniform();
    x.push_back({sig, rng.uniform(), rng.uniform(), rng.uniform()});
    y.push_back(sig > 0.5 ? 1 : 0);
  }
  TrainConfig cfg;
  cfg.n_trees = 50;
  cfg.seed = 17;
  const Forest f = train(make_dataset(x, y), cfg);
  const auto ranked = feature_importance(f);
  EXPECT_EQ(ranked[0].first, "f0");
  EXPECT_GT(ranked[0].second, 0.85);
  double sum = 0.0;
  for (const auto& [name, v] : ranked) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Importance, PureNoiseIsRoughlyUniform) {
  Rng rng(4242);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 300; ++i) {
    x.push_back({rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
    y.push_back(static_cast<int>(rng.bounded(2)));
  }
  TrainConfig cfg;
  cfg.n_trees = 100;
  cfg.seed = 3;
  const Forest f = train(make_dataset(x, y), cfg);
  const double tol = 3.0 / std::sqrt(100.0);
  for (double v : f.importances) EXPECT_NEAR(v, 0.25, tol);
}

TEST(Train, DeterministicGivenSeed) {
  Rng rng(8);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 80; ++i) {
    x.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    y.push_back(x.back()[1] > 0.4 ? 1 : 0);
  }
  const Dataset data = make_dataset(x, y);
  TrainConfig cfg;
  cfg.n_trees = 20;
  cfg.seed = 99;
  testing::TempDir dir("det");
  const Forest a = train(data, cfg);
  const Forest b = train(data, cfg);
  save_forest_json(a, dir.path("a.json"));
  save_forest_json(b, dir.path("b.json"));
  EXPECT_EQ(testing::slurp(dir.path("a.json")), testing::slurp(dir.path("b.json")));

  cfg.seed = 100;
  const Forest c = train(data, cfg);
  save_forest_json(c, dir.path("c.json"));
  EXPECT_NE(testing::slurp(dir.path("a.json")), testing::slurp(dir.path("c.json")));
}

TEST(Train, MonotoneRelabelInvariance) {
  // A strictly increasing transform of one feature column preserves every
  // split decision and therefore every prediction.
  Rng rng(31);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 120; ++i) {
    x.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
    y.push_back(x.back()[0] + 0.3 * x.back()[2] > 0.0 ? 1 : 0);
  }
  auto xt = x;
  for (auto& row : xt) row[0] = std::exp(row[0]);  // strictly increasing

  TrainConfig cfg;
  cfg.n_trees = 15;
  cfg.seed = 5;
  const Forest fa = train(make_dataset(x, y), cfg);
  const Forest fb = train(make_dataset(xt, y), cfg);

  ASSERT_EQ(fa.trees.size(), fb.trees.size());
  for (std::size_t t = 0; t < fa.trees.size(); ++t) {
    ASSERT_EQ(fa.trees[t].nodes.size(), fb.trees[t].nodes.size());
    for (std::size_t k = 0; k < fa.trees[t].nodes.size(); ++k) {
      const TreeNode& na = fa.trees[t].nodes[k];
      const TreeNode& nb = fb.trees[t].nodes[k];
      EXPECT_EQ(na.feature, nb.feature);
      EXPECT_EQ(na.left, nb.left);
      EXPECT_EQ(na.right, nb.right);
      if (na.is_leaf()) {
        EXPECT_EQ(na.leaf, nb.leaf);
      }
    }
  }
  // Threshold midpoints move under the transform, so equality of
  // predictions is an order statement: it holds for points whose transformed
  // coordinate keeps its rank among the training values, in particular for
  // the training rows themselves.
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(predict_proba(fa, x[i])[1], predict_proba(fb, xt[i])[1]);
  }
}

void expect_tree_matches_oracle(const Tree& tree, const testing::OracleNode* node, int at) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(at)];
  if (node->leaf) {
    ASSERT_TRUE(n.is_leaf());
    EXPECT_EQ(static_cast<int>(n.leaf), node->label);
    return;
  }
  ASSERT_FALSE(n.is_leaf());
  EXPECT_EQ(n.feature, node->feature);
  EXPECT_DOUBLE_EQ(n.threshold, node->threshold);
  expect_tree_matches_oracle(tree, node->left.get(), n.left);
  expect_tree_matches_oracle(tree, node->right.get(), n.right);
}

TEST(Train, SingleTreeMatchesExhaustiveGreedyOracle) {
  Rng rng(2718);
  int valid = 0;
  for (int trial = 0; trial < 50 || valid < 40; ++trial) {
    const int n = 4 + static_cast<int>(rng.bounded(61));
    const int d = 1 + static_cast<int>(rng.bounded(3));
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    bool saw[2] = {false, false};
    for (int i = 0; i < n; ++i) {
      std::vector<double> row;
      for (int f = 0; f < d; ++f) {
        // Mix of continuous values and coarse levels to exercise ties.
        row.push_back(rng.uniform() < 0.3 ? static_cast<double>(rng.bounded(4))
                                          : rng.uniform(-1.0, 1.0));
      }
      const int label = (row[0] > 0.0) != (rng.uniform() < 0.2) ? 1 : 0;
      x.push_back(row);
      y.push_back(label);
      saw[label] = true;
    }
    if (!saw[0] || !saw[1]) continue;
    ++valid;

    TrainConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.mtry = d;
    cfg.seed = rng.next_u64();
    const Forest f = train(make_dataset(x, y), cfg);

    std::vector<std::size_t> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto oracle = testing::oracle_grow(x, y, std::move(rows));
    expect_tree_matches_oracle(f.trees[0], oracle.get(), 0);
    if (trial > 200) break;
  }
  EXPECT_GE(valid, 40);
}

TEST(Train, PureLeafGrowthReachesPerfectTrainingAccuracy) {
  Rng rng(555);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 150; ++i) {
    x.push_back({rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
    y.push_back(static_cast<int>(rng.bounded(2)));
  }
  TrainConfig cfg;
  cfg.n_trees = 10;
  cfg.bootstrap = false;  // every tree sees every sample
  cfg.seed = 12;
  const Dataset data = make_dataset(x, y);
  const Forest f = train(data, cfg);
  EXPECT_DOUBLE_EQ(evaluate(f, data).accuracy, 1.0);
}

TEST(Train, OutOfBagAccuracyReported) {
  Rng rng(66);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    x.push_back({rng.uniform(), rng.uniform()});
    y.push_back(x.back()[0] > 0.5 ? 1 : 0);
  }
  TrainConfig cfg;
  cfg.n_trees = 40;
  cfg.seed = 2;
  const Forest f = train(make_dataset(x, y), cfg);
  EXPECT_GT(f.oob_accuracy, 0.9);

  cfg.bootstrap = false;
  const Forest g = train(make_dataset(x, y), cfg);
  EXPECT_DOUBLE_EQ(g.oob_accuracy, -1.0);
}

TEST(ForestJson, RoundTripAndVersionGuard) {
  Rng rng(21);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    x.push_back({rng.uniform(), rng.uniform()});
    y.push_back(x.back()[1] > 0.3 ? 1 : 0);
  }
  TrainConfig cfg;
  cfg.n_trees = 9;
  cfg.seed = 77;
  const Forest f = train(make_dataset(x, y), cfg);

  testing::TempDir dir("json");
  save_forest_json(f, dir.path("f.json"));
  const Forest g = load_forest_json(dir.path("f.json"));
  EXPECT_EQ(g.trees.size(), f.trees.size());
  EXPECT_EQ(g.feature_names, f.feature_names);
  EXPECT_EQ(g.config.seed, f.config.seed);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> p = {rng.uniform(), rng.uniform()};
    EXPECT_EQ(predict_proba(f, p), predict_proba(g, p));
  }

  testing::write_file(dir.path("bad.json"), "{\"format\":\"something-else\",\"version\":1}");
  EXPECT_THROW(load_forest_json(dir.path("bad.json")), SchemaError);
}

TEST(SplitByVehicle, NoVehicleStraddlesTheBoundary) {
  Rng rng(3);
  Dataset data;
  data.feature_names = {"f0"};
  for (long v = 1; v <= 20; ++v) {
    for (int i = 0; i < 10; ++i) {
      data.push(v, i, i % 2 ? Label::lane_change : Label::lane_keep, {rng.uniform()});
    }
  }
  const auto [train_set, test_set] = split_by_vehicle(data, 0.2, 9);
  EXPECT_EQ(train_set.size() + test_set.size(), data.size());
  EXPECT_EQ(test_set.size(), 40u);  // 4 of 20 vehicles
  for (long tv : test_set.vehicle_ids) {
    for (long rv : train_set.vehicle_ids) EXPECT_NE(tv, rv);
  }
  // Deterministic under the same seed.
  const auto [train2, test2] = split_by_vehicle(data, 0.2, 9);
  EXPECT_EQ(test2.vehicle_ids, test_set.vehicle_ids);
}

}  // namespace
}  // namespace lanekit
