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

#ifndef LANEKIT_SCENE_HPP
#define LANEKIT_SCENE_HPP

#include <optional>
#include <vector>

#include "lanekit/trajdata.hpp"

namespace lanekit {

/// Kinematic state of one vehicle at one frame.
struct AgentState {
  long vehicle_id = 0;
  double x = 0.0;  ///< centre, along road
  double y = 0.0;  ///< centre, across road
  double speed = 0.0;
  double length = 4.5;
  double width = 1.8;
  int lane_id = 0;  ///< as recorded; consumers re-derive from y where it matters
};

/// Frame-indexed view over a set of tracks.
class SceneIndex {
 public:
  explicit SceneIndex(const std::vector<VehicleTrack>* tracks) : tracks_(tracks) {}

  /// All vehicles present at `frame`, except `exclude_id` when >= 0.
  std::vector<AgentState> snapshot(long frame, long exclude_id = -1) const;

  std::optional<AgentState> agent(long frame, long vehicle_id) const;

 private:
  const std::vector<VehicleTrack>* tracks_;
};

AgentState agent_from_sample(const VehicleTrack& track, std::size_t index);

}  // namespace lanekit

#endif  // LANEKIT_SCENE_HPP
