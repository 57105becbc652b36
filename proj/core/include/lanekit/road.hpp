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

#ifndef LANEKIT_ROAD_HPP
#define LANEKIT_ROAD_HPP

#include <vector>

namespace lanekit {

/// Longitudinal interval [lo, hi] in metres.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x, double margin = 0.0) const { return x >= lo - margin && x <= hi + margin; }
};

/// Straight multi-lane road segment.
///
/// Coordinate convention used throughout: x runs along the road in the
/// direction of travel, y runs across it and increases toward the LEFT.
/// Lane ids count from the leftmost lane (id 1, highest y) to the rightmost
/// (id lane_count), matching camera-dataset numbering.
struct RoadGeometry {
  int lane_count = 0;
  double lane_width = 0.0;
  std::vector<double> lane_centres;       ///< increasing y; [k] is lane id (lane_count - k)
  std::vector<double> marking_positions;  ///< lane_count + 1 entries, strictly increasing y
  std::vector<Interval> ramp_zones;       ///< entrance/exit ramp proximity, longitudinal

  /// Uniform road with the rightmost marking at y = y_right_edge.
  static RoadGeometry uniform(int lane_count, double lane_width, double y_right_edge = 0.0);

  /// Checks the structural invariants, throws ParamError on violation.
  void validate() const;

  /// Centre line of a lane id in [1, lane_count].
  double lane_centre(int lane_id) const;

  /// Lane id containing lateral position y, clamped to [1, lane_count].
  int lane_id_at(double y) const;

  /// Marking between `lane_id` and the lane to its left (lane_id - 1).
  double marking_left_of(int lane_id) const;

  /// Marking between `lane_id` and the lane to its right (lane_id + 1).
  double marking_right_of(int lane_id) const;

  double left_edge() const { return marking_positions.back(); }
  double right_edge() const { return marking_positions.front(); }

  bool near_ramp(double x, double margin) const;
};

}  // namespace lanekit

#endif  // LANEKIT_ROAD_HPP
