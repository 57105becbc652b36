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

#ifndef LANEKIT_DATASET_HPP
#define LANEKIT_DATASET_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lanekit/context.hpp"
#include "lanekit/events.hpp"

namespace lanekit {

enum class Label : std::uint8_t { lane_keep = 0, lane_change = 1 };

inline const char* to_string(Label l) {
  return l == Label::lane_change ? "lane_change" : "lane_keep";
}

/// Labeled feature matrix with per-instance provenance.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<FeatureVector> features;
  std::vector<Label> labels;
  std::vector<long> vehicle_ids;
  std::vector<long> frames;

  std::size_t size() const { return features.size(); }
  std::size_t dim() const { return feature_names.size(); }

  void push(long vehicle_id, long frame, Label label, FeatureVector f);
  Dataset subset(const std::vector<std::size_t>& idx) const;
};

/// Splits by vehicle id (seeded shuffle) so trajectories never straddle the
/// train/test boundary. Returns (train, test).
std::pair<Dataset, Dataset> split_by_vehicle(const Dataset& data, double test_frac,
                                             std::uint64_t seed);

void write_instances_csv(const std::string& path, const Dataset& data);
Dataset read_instances_csv(const std::string& path);

/// Detects crossings, labels initiations, and applies the exclusion rules
/// over every track. Returned events carry their exclusion flags.
std::vector<LaneChangeEvent> extract_events(const std::vector<VehicleTrack>& tracks,
                                            const RoadGeometry& road, const EventParams& params);

struct ExtractionReport {
  long events_total = 0;
  long events_retained = 0;
  long excluded_mandatory = 0;
  long excluded_ramp = 0;
  long excluded_headway = 0;
  long excluded_indeterminate = 0;
  long short_keep_windows = 0;
  long skipped_no_history = 0;
};

/// A labeled frame awaiting featurization.
struct InstanceRef {
  long vehicle_id = 0;
  int segment = 0;
  long frame = 0;
  Label label = Label::lane_keep;
  long crossing_frame = -1;  ///< provenance: the event this instance came from
};

/// One lane-change instance at each retained initiation frame plus
/// `keep_per_event` lane-keep frames sampled (seeded) from the window before
/// the initiation. Balanced when every keep window is long enough.
std::vector<InstanceRef> assemble_instances(const std::vector<VehicleTrack>& tracks,
                                            const std::vector<LaneChangeEvent>& events,
                                            const EventParams& params, std::uint64_t seed,
                                            ExtractionReport* report = nullptr);

void write_instance_refs_csv(const std::string& path, const std::vector<InstanceRef>& refs);
std::vector<InstanceRef> read_instance_refs_csv(const std::string& path);

/// Evaluates the feature vector at every referenced frame, carrying the
/// utility state along each track from its first frame. Instances without
/// enough history for the configured stacking are dropped and counted.
Dataset featurize_instances(const std::vector<VehicleTrack>& tracks, const RoadGeometry& road,
                            const std::vector<InstanceRef>& refs, const FeatureConfig& fcfg,
                            ExtractionReport* report = nullptr);

/// extract_events + assemble_instances + featurize_instances.
Dataset build_dataset(const std::vector<VehicleTrack>& tracks, const RoadGeometry& road,
                      const EventParams& eparams, const FeatureConfig& fcfg, std::uint64_t seed,
                      ExtractionReport* report = nullptr,
                      std::vector<LaneChangeEvent>* events_out = nullptr);

}  // namespace lanekit

#endif  // LANEKIT_DATASET_HPP
