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

#ifndef LANEKIT_CONTEXT_HPP
#define LANEKIT_CONTEXT_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lanekit/scene.hpp"

namespace lanekit {

/// One neighbor slot. Gaps are bumper-to-bumper (centre distance minus half
/// lengths); rel_speed is other minus ego.
struct Neighbor {
  bool present = false;
  long vehicle_id = -1;
  double gap = 0.0;
  double rel_speed = 0.0;
  double speed = 0.0;  ///< the neighbor's own speed, used for headways
};

/// Lead vehicle plus the front-left / rear-left pair.
struct NeighborSet {
  Neighbor lv;
  Neighbor fl;
  Neighbor rl;
};

enum class TargetLane { current, left };

/// Nearest qualifying vehicles around the ego. LV is the lead in the lane
/// selected by `side`; FL/RL are the nearest ahead/behind in the lane to the
/// ego's left. Vehicles beyond `sensing_range` are ignored.
NeighborSet identify_neighbors(std::span<const AgentState> snapshot, const AgentState& ego,
                               const RoadGeometry& road, TargetLane side,
                               double sensing_range = 100.0);

/// Lookup overload: `ego_id` must be present in the snapshot.
NeighborSet identify_neighbors(std::span<const AgentState> snapshot, long ego_id,
                               const RoadGeometry& road, TargetLane side,
                               double sensing_range = 100.0);

/// Time to collision: gap / closing_speed while closing, capped at ttc_max;
/// ttc_max when opening or stationary; 0 when the gap is already closed.
double ttc(double gap, double closing_speed, double ttc_max = 60.0);

/// Running contentment feature. delta accumulates rel_speed/gap toward the
/// current lead vehicle and resets when the lead changes.
struct UtilityState {
  double delta = 0.0;
  long lv_id = -1;
  long t0 = 0;  ///< frame at which the current LV became LV
};

/// One accumulation step against a present LV with positive gap `x_lv` and
/// relative speed `v_lv`. A positive utility is wiped by any negative
/// increment; a negative utility keeps accumulating.
UtilityState utility_update(const UtilityState& state, double v_lv, double x_lv, long lv_id,
                            long frame = 0);

/// Step with no LV present: delta decays to zero immediately.
UtilityState utility_reset(const UtilityState& state, long frame = 0);

/// Convenience wrapper driving utility_update from a NeighborSet.
UtilityState utility_step(const UtilityState& state, const NeighborSet& n, long frame = 0);

struct FeatureConfig {
  double sentinel_gap = 200.0;
  double sentinel_rel_speed = 0.0;
  double ttc_max = 60.0;
  double sensing_range = 100.0;
  int n_past = 0;    ///< history augmentation: number of past base vectors
  int step_gap = 1;  ///< frames between stacked past vectors
};

using FeatureVector = std::vector<double>;

inline constexpr int kFeatureCount = 10;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "x_RL", "TTC_RL", "Delta", "TTC_FL", "v_FL", "x_FL", "v_RL", "v_LV", "x_LV", "vel_SV"};

/// Base feature vector in the fixed order of kFeatureNames.
FeatureVector featurize(const NeighborSet& n, double ego_speed, const UtilityState& utility,
                        const FeatureConfig& cfg = {});

/// Concatenates [f(t), f(t-step_gap), ..., f(t-n_past*step_gap)].
FeatureVector history_stack(std::span<const FeatureVector> series, std::size_t t, int n_past,
                            int step_gap);

/// Column names for an (optionally history-augmented) feature matrix.
std::vector<std::string> feature_names(int n_past = 0);

int feature_index(const std::string& name, int n_past = 0);  // throws LookupError

}  // namespace lanekit

#endif  // LANEKIT_CONTEXT_HPP
