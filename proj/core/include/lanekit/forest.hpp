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

#ifndef LANEKIT_FOREST_HPP
#define LANEKIT_FOREST_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lanekit/dataset.hpp"

namespace lanekit {

struct TrainConfig {
  int n_trees = 100;
  int mtry = 0;  ///< features considered per split; 0 selects ceil(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int min_samples_split = 2;
  int max_depth = 0;  ///< 0 = unlimited
};

/// Flat-array decision tree node: either a split or a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Label leaf = Label::lane_keep;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  Label predict(std::span<const double> f) const;
};

struct Forest {
  std::vector<Tree> trees;
  std::vector<std::string> feature_names;
  TrainConfig config;
  std::vector<double> importances;  ///< per feature, >= 0, sums to 1
  double oob_accuracy = -1.0;       ///< out-of-bag; -1 when bootstrap is off

  std::size_t dim() const { return feature_names.size(); }
};

/// Grows `n_trees` trees on bootstrap resamples (when enabled). Splits
/// maximise Gini impurity decrease over thresholds placed at midpoints of
/// consecutive sorted unique feature values, with ties broken by lower
/// feature index then lower threshold. Trees grow until leaves are pure or
/// no sampled feature varies inside the node.
Forest train(const Dataset& data, TrainConfig cfg);

/// Eq. of the ensemble: the probability of a class is the fraction of trees
/// voting for it. Returns {p(lane_keep), p(lane_change)}.
std::array<double, 2> predict_proba(const Forest& forest, std::span<const double> f);

Label predict(const Forest& forest, std::span<const double> f);  // tie -> lane_keep

struct Metrics {
  double accuracy = 0.0;
  std::array<std::array<long, 2>, 2> confusion{};  ///< [true][predicted]
  std::array<double, 2> precision{};
  std::array<double, 2> recall{};
  long count = 0;
};

Metrics evaluate(const Forest& forest, const Dataset& test);

/// Normalized mean Gini decrease per feature, descending; ties resolved by
/// feature index.
std::vector<std::pair<std::string, double>> feature_importance(const Forest& forest);

void save_forest_json(const Forest& forest, const std::string& path);
Forest load_forest_json(const std::string& path);

}  // namespace lanekit

#endif  // LANEKIT_FOREST_HPP
