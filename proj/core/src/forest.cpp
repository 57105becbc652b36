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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "lanekit/errors.hpp"
#include "lanekit/rng.hpp"
#include "nlohmann/json.hpp"

namespace lanekit {

namespace {

double gini(long a, long b) {
  const double n = static_cast<double>(a + b);
  if (n == 0.0) return 0.0;
  const double pa = static_cast<double>(a) / n;
  const double pb = static_cast<double>(b) / n;
  return 1.0 - pa * pa - pb * pb;
}

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;

  /// Max decrease; ties go to the lower feature index, then lower threshold.
  void offer(int f, double thr, double dec) {
    if (!found || dec > decrease ||
        (dec == decrease && (f < feature || (f == feature && thr < threshold)))) {
      found = true;
      feature = f;
      threshold = thr;
      decrease = dec;
    }
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TrainConfig& cfg, int mtry, Rng& rng,
              std::vector<double>& importance_accum)
      : data_(data), cfg_(cfg), mtry_(mtry), rng_(rng), importance_(importance_accum) {}

  Tree build(std::vector<std::size_t> indices) {
    root_size_ = static_cast<double>(indices.size());
    Tree tree;
    grow(tree, std::move(indices), 0);
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<std::size_t> indices, int depth) {
    long n_keep = 0;
    long n_change = 0;
    for (std::size_t i : indices) {
      (data_.labels[i] == Label::lane_keep ? n_keep : n_change)++;
    }

    const auto make_leaf = [&](Label label) {
      TreeNode node;
      node.leaf = label;
      tree.nodes.push_back(node);
      return static_cast<int>(tree.nodes.size()) - 1;
    };
    // Majority label; an exact tie defaults to lane_keep.
    const Label majority = n_change > n_keep ? Label::lane_change : Label::lane_keep;

    if (n_keep == 0 || n_change == 0) return make_leaf(majority);
    if (static_cast<int>(indices.size()) < cfg_.min_samples_split) return make_leaf(majority);
    if (cfg_.max_depth > 0 && depth >= cfg_.max_depth) return make_leaf(majority);

    const SplitCandidate best = find_split(indices, n_keep, n_change);
    if (!best.found) return make_leaf(majority);  // no sampled feature varies

    importance_[static_cast<std::size_t>(best.feature)] +=
        (static_cast<double>(indices.size()) / root_size_) * best.decrease;

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (std::size_t i : indices) {
      (data_.features[i][static_cast<std::size_t>(best.feature)] <= best.threshold ? left_idx
                                                                                   : right_idx)
          .push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    const int me = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[me].feature = best.feature;
    tree.nodes[me].threshold = best.threshold;
    const int l = grow(tree, std::move(left_idx), depth + 1);
    const int r = grow(tree, std::move(right_idx), depth + 1);
    tree.nodes[me].left = l;
    tree.nodes[me].right = r;
    return me;
  }

  SplitCandidate find_split(const std::vector<std::size_t>& indices, long n_keep, long n_change) {
    const int d = static_cast<int>(data_.dim());
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(order);

    const double parent_gini = gini(n_keep, n_change);
    const double n = static_cast<double>(indices.size());

    SplitCandidate best;
    int varying_seen = 0;
    for (int f : order) {
      // Sort the node's samples along this feature.
      std::vector<std::pair<double, Label>> vals;
      vals.reserve(indices.size());
      for (std::size_t i : indices) {
        vals.emplace_back(data_.features[i][static_cast<std::size_t>(f)], data_.labels[i]);
      }
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (vals.front().first == vals.back().first) continue;  // constant here

      ++varying_seen;
      long left_keep = 0;
      long left_change = 0;
      for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
        (vals[k].second == Label::lane_keep ? left_keep : left_change)++;
        if (vals[k].first == vals[k + 1].first) continue;
        const double thr = 0.5 * (vals[k].first + vals[k + 1].first);
        const double nl = static_cast<double>(k + 1);
        const double nr = n - nl;
        const double dec = parent_gini -
                           (nl / n) * gini(left_keep, left_change) -
                           (nr / n) * gini(n_keep - left_keep, n_change - left_change);
        best.offer(f, thr, dec);
      }
      // mtry varying features inspected; extra features are only consulted
      // when none of the sampled ones varied (keeps growth to pure leaves).
      if (varying_seen >= mtry_) break;
    }
    return best;
  }

  const Dataset& data_;
  const TrainConfig& cfg_;
  int mtry_;
  Rng& rng_;
  std::vector<double>& importance_;
  double root_size_ = 1.0;
};

}  // namespace

Label Tree::predict(std::span<const double> f) const {
  int at = 0;
  while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
    const TreeNode& node = nodes[static_cast<std::size_t>(at)];
    at = f[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(at)].leaf;
}

Forest train(const Dataset& data, TrainConfig cfg) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n < 2) throw ParamError("train: need at least 2 instances");
  if (cfg.n_trees < 1) throw ParamError("train: n_trees must be >= 1");
  for (const auto& f : data.features) {
    if (f.size() != d) throw ShapeError("train: feature vector length mismatch");
  }
  long n_change = 0;
  for (Label l : data.labels) n_change += l == Label::lane_change ? 1 : 0;
  if (n_change == 0 || n_change == static_cast<long>(n)) {
    throw ParamError("train: single-class dataset would grow a degenerate forest");
  }

  int mtry = cfg.mtry;
  if (mtry == 0) mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
  if (mtry < 1 || mtry > static_cast<int>(d)) throw ParamError("train: mtry outside [1, d]");
  cfg.mtry = mtry;

  Forest forest;
  forest.config = cfg;
  forest.feature_names = data.feature_names;
  if (forest.feature_names.empty()) {
    for (std::size_t i = 0; i < d; ++i) forest.feature_names.push_back("f" + std::to_string(i));
  }

  std::vector<double> importance(d, 0.0);
  std::vector<std::vector<long>> oob_votes;  // [sample][class]
  if (cfg.bootstrap) oob_votes.assign(n, std::vector<long>(2, 0));

  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(cfg.seed + static_cast<std::uint64_t>(t));
    std::vector<std::size_t> indices(n);
    std::vector<char> in_bag(n, 0);
    if (cfg.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        indices[i] = rng.bounded(n);
        in_bag[indices[i]] = 1;
      }
    } else {
      std::iota(indices.begin(), indices.end(), std::size_t{0});
    }

    TreeBuilder builder(data, cfg, mtry, rng, importance);
    forest.trees.push_back(builder.build(std::move(indices)));

    if (cfg.bootstrap) {
      const Tree& tree = forest.trees.back();
      for (std::size_t i = 0; i < n; ++i) {
        if (!in_bag[i]) {
          oob_votes[i][static_cast<std::size_t>(tree.predict(data.features[i]))]++;
        }
      }
    }
  }

  double total = 0.0;
  for (double v : importance) total += v;
  forest.importances.assign(d, 1.0 / static_cast<double>(d));
  if (total > 0.0) {
    for (std::size_t i = 0; i < d; ++i) forest.importances[i] = importance[i] / total;
  }

  if (cfg.bootstrap) {
    long correct = 0;
    long counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long votes_keep = oob_votes[i][0];
      const long votes_change = oob_votes[i][1];
      if (votes_keep + votes_change == 0) continue;
      ++counted;
      const Label pred = votes_change > votes_keep ? Label::lane_change : Label::lane_keep;
      if (pred == data.labels[i]) ++correct;
    }
    forest.oob_accuracy =
        counted > 0 ? static_cast<double>(correct) / static_cast<double>(counted) : -1.0;
  }
  return forest;
}

std::array<double, 2> predict_proba(const Forest& forest, std::span<const double> f) {
  if (f.size() != forest.dim()) {
    throw ShapeError("predict_proba: expected " + std::to_string(forest.dim()) +
                     " features, got " + std::to_string(f.size()));
  }
  long votes_change = 0;
  for (const Tree& t : forest.trees) {
    votes_change += t.predict(f) == Label::lane_change ? 1 : 0;
  }
  const double T = static_cast<double>(forest.trees.size());
  const double p_change = static_cast<double>(votes_change) / T;
  return {(T - static_cast<double>(votes_change)) / T, p_change};
}

Label predict(const Forest& forest, std::span<const double> f) {
  const auto p = predict_proba(forest, f);
  return p[1] > p[0] ? Label::lane_change : Label::lane_keep;
}

Metrics evaluate(const Forest& forest, const Dataset& test) {
  if (test.size() == 0) throw ParamError("evaluate: empty test set");
  Metrics m;
  m.count = static_cast<long>(test.size());
  long correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Label pred = predict(forest, test.features[i]);
    const Label truth = test.labels[i];
    m.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)]++;
    if (pred == truth) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  for (std::size_t c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(m.confusion[c][c]);
    const double fp = static_cast<double>(m.confusion[1 - c][c]);
    const double fn = static_cast<double>(m.confusion[c][1 - c]);
    m.precision[c] = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    m.recall[c] = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  }
  return m;
}

std::vector<std::pair<std::string, double>> feature_importance(const Forest& forest) {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < forest.dim(); ++i) {
    out.emplace_back(forest.feature_names[i], forest.importances[i]);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

namespace {

nlohmann::json node_to_json(const Tree& tree, int at) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(at)];
  if (n.is_leaf()) {
    return nlohmann::json{{"leaf", to_string(n.leaf)}};
  }
  return nlohmann::json{{"feature", n.feature},
                        {"threshold", n.threshold},
                        {"left", node_to_json(tree, n.left)},
                        {"right", node_to_json(tree, n.right)}};
}

int node_from_json(const nlohmann::json& nj, Tree& tree) {
  const int me = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (nj.contains("leaf")) {
    tree.nodes[static_cast<std::size_t>(me)].leaf =
        nj.at("leaf").get<std::string>() == "lane_change" ? Label::lane_change
                                                          : Label::lane_keep;
    return me;
  }
  tree.nodes[static_cast<std::size_t>(me)].feature = nj.at("feature").get<int>();
  tree.nodes[static_cast<std::size_t>(me)].threshold = nj.at("threshold").get<double>();
  const int l = node_from_json(nj.at("left"), tree);
  const int r = node_from_json(nj.at("right"), tree);
  tree.nodes[static_cast<std::size_t>(me)].left = l;
  tree.nodes[static_cast<std::size_t>(me)].right = r;
  return me;
}

}  // namespace

void save_forest_json(const Forest& forest, const std::string& path) {
  nlohmann::json j;
  j["format"] = "lanekit-forest";
  j["version"] = 1;
  j["feature_names"] = forest.feature_names;
  j["config"] = {{"n_trees", forest.config.n_trees},
                 {"mtry", forest.config.mtry},
                 {"bootstrap", forest.config.bootstrap},
                 {"seed", forest.config.seed},
                 {"min_samples_split", forest.config.min_samples_split},
                 {"max_depth", forest.config.max_depth}};
  j["importances"] = forest.importances;
  j["oob_accuracy"] = forest.oob_accuracy;
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& t : forest.trees) {
    trees.push_back(node_to_json(t, 0));
  }
  j["trees"] = std::move(trees);

  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write forest to " + path);
  out << j.dump(1) << '\n';
}

Forest load_forest_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open forest file " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "lanekit-forest" || j.value("version", 0) != 1) {
    throw SchemaError("unrecognized forest document: " + path);
  }
  Forest forest;
  forest.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  const auto& c = j.at("config");
  forest.config.n_trees = c.at("n_trees").get<int>();
  forest.config.mtry = c.at("mtry").get<int>();
  forest.config.bootstrap = c.at("bootstrap").get<bool>();
  forest.config.seed = c.at("seed").get<std::uint64_t>();
  forest.config.min_samples_split = c.at("min_samples_split").get<int>();
  forest.config.max_depth = c.at("max_depth").get<int>();
  forest.importances = j.at("importances").get<std::vector<double>>();
  forest.oob_accuracy = j.at("oob_accuracy").get<double>();
  for (const auto& tj : j.at("trees")) {
    Tree tree;
    node_from_json(tj, tree);
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace lanekit
