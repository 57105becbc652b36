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

#include "lanekit/scene.hpp"

namespace lanekit {

AgentState agent_from_sample(const VehicleTrack& track, std::size_t index) {
  const RawSample& s = track.samples[index];
  AgentState a;
  a.vehicle_id = s.vehicle_id;
  a.x = s.x;
  a.y = s.y;
  a.speed = index < track.longitudinal_speed.size() ? track.longitudinal_speed[index] : s.speed;
  a.length = s.length;
  a.width = s.width;
  a.lane_id = s.lane_id;
  return a;
}

std::vector<AgentState> SceneIndex::snapshot(long frame, long exclude_id) const {
  std::vector<AgentState> out;
  for (const auto& t : *tracks_) {
    if (t.vehicle_id == exclude_id) continue;
    if (!t.covers(frame)) continue;
    out.push_back(agent_from_sample(t, t.index_of(frame)));
  }
  return out;
}

std::optional<AgentState> SceneIndex::agent(long frame, long vehicle_id) const {
  for (const auto& t : *tracks_) {
    if (t.vehicle_id == vehicle_id && t.covers(frame)) {
      return agent_from_sample(t, t.index_of(frame));
    }
  }
  return std::nullopt;
}

}  // namespace lanekit
