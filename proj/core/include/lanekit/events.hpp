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

#ifndef LANEKIT_EVENTS_HPP
#define LANEKIT_EVENTS_HPP

#include <span>
#include <string>
#include <vector>

#include "lanekit/rng.hpp"
#include "lanekit/scene.hpp"

namespace lanekit {

enum class Direction { left, right };

inline const char* to_string(Direction d) { return d == Direction::left ? "left" : "right"; }

/// A marking crossing: the first frame at which the vehicle front-centre sits
/// on the far side of the marking it traversed.
struct Crossing {
  long frame = 0;
  Direction direction = Direction::left;
  double marking_y = 0.0;
};

struct LaneChangeEvent {
  long vehicle_id = 0;
  int segment = 0;
  long crossing_frame = 0;
  long initiation_frame = 0;
  Direction direction = Direction::left;
  bool low_confidence = false;
  bool excluded = false;
  std::string exclusion_reason;  ///< "mandatory_right" | "ramp" | "headway" | "indeterminate"
};

struct EventParams {
  double lat_speed_threshold = 0.1;  ///< m/s
  double headway_min = 2.0;          ///< s
  double ramp_margin = 100.0;        ///< m
  double merge_window = 2.0;         ///< s, oscillation guard
  double min_run = 0.5;              ///< s, sustained-run length for a confident initiation
  double sensing_range = 100.0;      ///< m, neighbor search for exclusions
  double keep_warmup = 3.0;          ///< s, utility burn-in before keep sampling
  double keep_margin = 1.0;          ///< s, clearance before initiation
  int keep_per_event = 1;
};

/// Frames where the vehicle front-centre lateral position crosses a lane
/// marking. Consecutive crossings of the same marking within `merge_window`
/// seconds merge into the first (oscillation guard).
std::vector<Crossing> detect_crossings(const VehicleTrack& track, const RoadGeometry& road,
                                       double merge_window = 2.0);

struct InitiationResult {
  long frame = 0;
  bool low_confidence = false;
};

/// Scans backward from the crossing: returns the frame after the last frame
/// at which the lateral speed toward the target lane is below `threshold`,
/// i.e. the start of the final sustained above-threshold run ending at the
/// crossing. Never below threshold in the prefix -> first frame, flagged.
InitiationResult find_initiation(std::span<const double> lat_speed, long first_frame,
                                 long crossing_frame, Direction direction, double ts,
                                 double threshold = 0.1, double min_run = 0.5);
InitiationResult find_initiation(const VehicleTrack& track, long crossing_frame,
                                 Direction direction, double threshold = 0.1,
                                 double min_run = 0.5);

/// Flags events that are mandatory (rightward), near a ramp, or initiated
/// with a rear-left/front-left time headway at or below `headway_min`.
/// Missing neighbor data makes an event indeterminate and excludes it.
void apply_exclusions(std::vector<LaneChangeEvent>& events, const RoadGeometry& road,
                      const SceneIndex& scenes, const EventParams& params);

/// Draws `count` distinct frames uniformly (seeded) from
/// [start + warmup, initiation - margin], sorted ascending. Returns fewer
/// when the window is short; `short_window` reports that case.
std::vector<long> sample_lane_keep(const VehicleTrack& track, long initiation_frame, int count,
                                   Rng& rng, double warmup_s = 3.0, double margin_s = 1.0,
                                   bool* short_window = nullptr);

}  // namespace lanekit

#endif  // LANEKIT_EVENTS_HPP
