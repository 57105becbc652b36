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

#include "lanekit/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lanekit/context.hpp"
#include "lanekit/errors.hpp"

namespace lanekit {

namespace {

// Front-centre lateral position. Heading is estimated from the position
// finite differences; the front bumper sits half a length ahead of the
// centre along the heading.
std::vector<double> front_centre_y(const VehicleTrack& track) {
  const std::size_t n = track.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = k > 0 ? k - 1 : 0;
    const std::size_t b = k + 1 < n ? k + 1 : n - 1;
    const double dx = track.samples[b].x - track.samples[a].x;
    const double dy = track.samples[b].y - track.samples[a].y;
    const double h = std::hypot(dx, dy);
    const double sin_psi = h > 1e-9 ? dy / h : 0.0;
    out[k] = track.samples[k].y + 0.5 * track.samples[k].length * sin_psi;
  }
  return out;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

std::vector<Crossing> detect_crossings(const VehicleTrack& track, const RoadGeometry& road,
                                       double merge_window) {
  std::vector<Crossing> all;
  if (track.size() < 2) return all;
  const std::vector<double> fy = front_centre_y(track);

  // Interior markings only; leaving the road is not a lane change.
  for (std::size_t m = 1; m + 1 < road.marking_positions.size(); ++m) {
    const double marking = road.marking_positions[m];
    int prev_sign = 0;
    for (std::size_t k = 0; k < fy.size(); ++k) {
      const int s = sign_of(fy[k] - marking);
      if (s == 0) continue;
      if (prev_sign != 0 && s != prev_sign) {
        Crossing c;
        c.frame = track.samples[k].frame;
        c.direction = s > 0 ? Direction::left : Direction::right;
        c.marking_y = marking;
        all.push_back(c);
      }
      prev_sign = s;
    }
  }

  std::stable_sort(all.begin(), all.end(),
                   [](const Crossing& a, const Crossing& b) { return a.frame < b.frame; });

  // Oscillation guard: repeated crossings of the same marking within the
  // merge window collapse into the first.
  std::vector<Crossing> merged;
  const long window_frames = static_cast<long>(std::llround(merge_window / track.ts));
  for (const auto& c : all) {
    bool absorbed = false;
    for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
      if (it->marking_y == c.marking_y && c.frame - it->frame <= window_frames) {
        absorbed = true;
        break;
      }
    }
    if (!absorbed) merged.push_back(c);
  }
  return merged;
}

InitiationResult find_initiation(std::span<const double> lat_speed, long first_frame,
                                 long crossing_frame, Direction direction, double ts,
                                 double threshold, double min_run) {
  if (lat_speed.size() < 2) throw ParamError("find_initiation needs >= 2 samples");
  const long cross_idx = crossing_frame - first_frame;
  if (cross_idx <= 0 || cross_idx >= static_cast<long>(lat_speed.size())) {
    throw ParamError("crossing frame outside the track interior");
  }
  const double sgn = direction == Direction::left ? 1.0 : -1.0;

  long j = cross_idx - 1;
  while (j >= 0 && sgn * lat_speed[static_cast<std::size_t>(j)] >= threshold) --j;
  if (j < 0) {
    return {first_frame, true};  // never below threshold in the prefix
  }
  long init_idx = j + 1;
  bool low_confidence = false;
  if (init_idx >= cross_idx) {
    // No above-threshold run reaches the crossing at all.
    init_idx = cross_idx - 1;
    low_confidence = true;
  }
  if (static_cast<double>(cross_idx - init_idx) * ts < min_run) low_confidence = true;
  return {first_frame + init_idx, low_confidence};
}

InitiationResult find_initiation(const VehicleTrack& track, long crossing_frame,
                                 Direction direction, double threshold, double min_run) {
  if (track.lateral_speed.size() != track.size()) {
    throw ParamError("track has no lateral-speed signal; smooth it first");
  }
  return find_initiation(track.lateral_speed, track.first_frame(), crossing_frame, direction,
                         track.ts, threshold, min_run);
}

void apply_exclusions(std::vector<LaneChangeEvent>& events, const RoadGeometry& road,
                      const SceneIndex& scenes, const EventParams& params) {
  for (auto& e : events) {
    if (e.excluded) continue;

    if (e.direction == Direction::right) {
      e.excluded = true;
      e.exclusion_reason = "mandatory_right";
      continue;
    }

    const auto ego_at_crossing = scenes.agent(e.crossing_frame, e.vehicle_id);
    const auto ego_at_initiation = scenes.agent(e.initiation_frame, e.vehicle_id);
    if (!ego_at_crossing || !ego_at_initiation) {
      e.excluded = true;
      e.exclusion_reason = "indeterminate";
      continue;
    }

    if (road.near_ramp(ego_at_crossing->x, params.ramp_margin)) {
      e.excluded = true;
      e.exclusion_reason = "ramp";
      continue;
    }

    const auto snapshot = scenes.snapshot(e.initiation_frame, e.vehicle_id);
    const NeighborSet n = identify_neighbors(snapshot, *ego_at_initiation, road,
                                             TargetLane::current, params.sensing_range);
    // Headway = gap over the trailing vehicle's own speed: the ego trails the
    // front-left vehicle, the rear-left vehicle trails the ego.
    const double inf = std::numeric_limits<double>::infinity();
    const double hw_fl =
        n.fl.present ? (ego_at_initiation->speed > 1e-9 ? n.fl.gap / ego_at_initiation->speed : inf)
                     : inf;
    const double hw_rl = n.rl.present ? (n.rl.speed > 1e-9 ? n.rl.gap / n.rl.speed : inf) : inf;
    if (hw_fl <= params.headway_min || hw_rl <= params.headway_min) {
      e.excluded = true;
      e.exclusion_reason = "headway";
    }
  }
}

std::vector<long> sample_lane_keep(const VehicleTrack& track, long initiation_frame, int count,
                                   Rng& rng, double warmup_s, double margin_s,
                                   bool* short_window) {
  if (count < 1) throw ParamError("sample_lane_keep: count must be >= 1");
  const long warmup = static_cast<long>(std::llround(warmup_s / track.ts));
  const long margin = static_cast<long>(std::llround(margin_s / track.ts));
  const long lo = track.first_frame() + warmup;
  const long hi = initiation_frame - margin;

  std::vector<long> frames;
  if (hi < lo) {
    if (short_window) *short_window = true;
    return frames;
  }
  const long window = hi - lo + 1;
  if (window <= count) {
    if (short_window) *short_window = true;
    for (long f = lo; f <= hi; ++f) frames.push_back(f);
    return frames;
  }
  if (short_window) *short_window = false;

  // Floyd's algorithm: `count` distinct draws from [0, window).
  std::set<long> chosen;
  for (long i = window - count; i < window; ++i) {
    const long t = static_cast<long>(rng.bounded(static_cast<std::size_t>(i + 1)));
    if (!chosen.insert(t).second) chosen.insert(i);
  }
  for (long idx : chosen) frames.push_back(lo + idx);
  return frames;
}

}  // namespace lanekit
