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

#ifndef LANEKIT_SYNTH_HPP
#define LANEKIT_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "lanekit/dataset.hpp"

namespace lanekit {

/// Synthetic corpus settings. The decision rule is a monotone conjunction
/// over the gap, time-to-collision, and utility features, so classifiers and
/// sensitivity sweeps have a known ground truth to recover.
struct SynthConfig {
  std::uint64_t seed = 7;

  // Feature-space corpus.
  int n_vehicles = 60;
  int instances_per_vehicle = 20;  ///< half lane_change, half lane_keep
  double label_noise = 0.05;
  double rule_delta_max = -0.3;  ///< lane change wanted only when discontent
  double rule_x_fl_min = 12.0;   ///< front-left gap required (m)
  double rule_ttc_rl_min = 4.0;  ///< rear-left time to collision required (s)
  double rule_x_rl_min = 8.0;    ///< rear-left gap required (m)

  // Scripted trajectory scenes.
  int n_episodes = 8;
  double episode_duration = 60.0;  ///< s
  double ts = 0.1;
  int lanes = 3;
  double lane_width = 3.7;
};

RoadGeometry synth_road(const SynthConfig& cfg);

/// The labeling rule, evaluated on a base (10-feature) vector.
bool synth_rule(const FeatureVector& f, const SynthConfig& cfg);

/// Balanced labeled corpus: per-vehicle episodes simulated in feature space
/// with the utility accumulator driven by the real update rule; instances
/// labeled by the monotone rule with `label_noise` flips.
Dataset synth_feature_corpus(const SynthConfig& cfg);

/// Scripted kinematic scenes (slow lead vehicle, clear or blocked left
/// lane); lane-change episodes perform a smoothstep lateral transition.
/// Suitable for the full ingest -> label -> featurize pipeline and replay.
std::vector<VehicleTrack> synth_tracks(const SynthConfig& cfg);

/// A frozen scene vector that satisfies the rule except for the swept
/// feature; used by sensitivity analyses.
FeatureVector synth_sweep_base(const SynthConfig& cfg);

}  // namespace lanekit

#endif  // LANEKIT_SYNTH_HPP
