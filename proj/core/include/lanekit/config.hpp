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

#ifndef LANEKIT_CONFIG_HPP
#define LANEKIT_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "lanekit/forest.hpp"
#include "lanekit/sim.hpp"
#include "lanekit/synth.hpp"
#include "lanekit/trajdata.hpp"

namespace lanekit {

/// Whole-pipeline configuration. Defaults follow the published operating
/// point: 0.1 m/s initiation threshold, 2 s headway, 100 trees, H = 30,
/// Ts = 0.1 s, 0.8 commit threshold.
struct RunConfig {
  // [run]
  std::uint64_t seed = 7;

  // [data]
  std::string tracks_path;
  std::string schema = "native";  ///< native | ngsim
  double ts = 0.1;
  int max_gap_fill = 5;

  // [road]
  int lanes = 3;
  double lane_width = 3.7;
  double y_right_edge = 0.0;
  std::string ramp_zones;  ///< "lo:hi;lo:hi" longitudinal intervals

  // [smoothing]
  double alpha = 0.3;
  EkfConfig ekf;

  // [events]
  EventParams events;

  // [features]
  FeatureConfig features;

  // [forest]
  TrainConfig forest;
  double holdout_frac = 0.2;

  // [planner] + [sim]
  SimParams sim;

  // [synth]
  SynthConfig synth;

  static RunConfig defaults() {
    RunConfig c;
    c.sync_derived();
    return c;
  }
  static RunConfig from_file(const std::string& path);

  /// Propagates the run seed and shared geometry into the nested configs.
  void sync_derived();

  /// Canonical INI rendering (fixed section and key order).
  std::string to_ini() const;
  void save(const std::string& path) const;

  RoadGeometry road() const;
  std::uint64_t hash() const;
};

/// Minimal INI reader: [section] headers, key = value lines, # comments.
std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& text);

}  // namespace lanekit

#endif  // LANEKIT_CONFIG_HPP
