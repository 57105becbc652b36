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

#include "lanekit/road.hpp"

#include <string>

#include "lanekit/errors.hpp"

namespace lanekit {

RoadGeometry RoadGeometry::uniform(int lane_count, double lane_width, double y_right_edge) {
  if (lane_count < 1 || lane_width <= 0.0) {
    throw ParamError("road must have >= 1 lane with positive width");
  }
  RoadGeometry road;
  road.lane_count = lane_count;
  road.lane_width = lane_width;
  for (int i = 0; i <= lane_count; ++i) {
    road.marking_positions.push_back(y_right_edge + i * lane_width);
  }
  for (int i = 0; i < lane_count; ++i) {
    road.lane_centres.push_back(y_right_edge + (i + 0.5) * lane_width);
  }
  return road;
}

void RoadGeometry::validate() const {
  if (lane_count < 1) throw ParamError("lane_count must be >= 1");
  if (marking_positions.size() != static_cast<std::size_t>(lane_count) + 1) {
    throw ParamError("marking_positions must have lane_count + 1 entries");
  }
  for (std::size_t i = 1; i < marking_positions.size(); ++i) {
    if (marking_positions[i] <= marking_positions[i - 1]) {
      throw ParamError("marking_positions must be strictly increasing");
    }
  }
  if (lane_centres.size() != static_cast<std::size_t>(lane_count)) {
    throw ParamError("lane_centres must have lane_count entries");
  }
  for (int i = 0; i < lane_count; ++i) {
    const double mid = 0.5 * (marking_positions[i] + marking_positions[i + 1]);
    if (lane_centres[i] < mid - 1e-9 || lane_centres[i] > mid + 1e-9) {
      throw ParamError("lane_centres must be midpoints of adjacent markings");
    }
  }
}

double RoadGeometry::lane_centre(int lane_id) const {
  if (lane_id < 1 || lane_id > lane_count) {
    throw ParamError("lane id " + std::to_string(lane_id) + " outside road");
  }
  return lane_centres[lane_count - lane_id];
}

int RoadGeometry::lane_id_at(double y) const {
  for (int k = lane_count - 1; k >= 0; --k) {
    if (y >= marking_positions[k]) return lane_count - k;
  }
  return lane_count;
}

double RoadGeometry::marking_left_of(int lane_id) const {
  if (lane_id < 1 || lane_id > lane_count) {
    throw ParamError("lane id " + std::to_string(lane_id) + " outside road");
  }
  return marking_positions[lane_count - lane_id + 1];
}

double RoadGeometry::marking_right_of(int lane_id) const {
  if (lane_id < 1 || lane_id > lane_count) {
    throw ParamError("lane id " + std::to_string(lane_id) + " outside road");
  }
  return marking_positions[lane_count - lane_id];
}

bool RoadGeometry::near_ramp(double x, double margin) const {
  for (const auto& z : ramp_zones) {
    if (z.contains(x, margin)) return true;
  }
  return false;
}

}  // namespace lanekit
