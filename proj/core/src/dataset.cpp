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

#include "lanekit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lanekit/csv.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/rng.hpp"

namespace lanekit {

void Dataset::push(long vehicle_id, long frame, Label label, FeatureVector f) {
  if (!feature_names.empty() && f.size() != feature_names.size()) {
    throw ShapeError("dataset push: feature vector length mismatch");
  }
  vehicle_ids.push_back(vehicle_id);
  frames.push_back(frame);
  labels.push_back(label);
  features.push_back(std::move(f));
}

Dataset Dataset::subset(const std::vector<std::size_t>& idx) const {
  Dataset out;
  out.feature_names = feature_names;
  for (std::size_t i : idx) {
    out.push(vehicle_ids[i], frames[i], labels[i], features[i]);
  }
  return out;
}

std::pair<Dataset, Dataset> split_by_vehicle(const Dataset& data, double test_frac,
                                             std::uint64_t seed) {
  if (test_frac <= 0.0 || test_frac >= 1.0) throw ParamError("test_frac must lie in (0, 1)");
  std::vector<long> vehicles(data.vehicle_ids);
  std::sort(vehicles.begin(), vehicles.end());
  vehicles.erase(std::unique(vehicles.begin(), vehicles.end()), vehicles.end());
  if (vehicles.size() < 2) throw ParamError("need at least 2 vehicles to split by vehicle");

  Rng rng(seed);
  rng.shuffle(vehicles);
  std::size_t n_test = static_cast<std::size_t>(
      std::llround(test_frac * static_cast<double>(vehicles.size())));
  n_test = std::max<std::size_t>(1, std::min(n_test, vehicles.size() - 1));
  std::set<long> test_ids(vehicles.begin(), vehicles.begin() + static_cast<long>(n_test));

  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (test_ids.count(data.vehicle_ids[i]) ? test_idx : train_idx).push_back(i);
  }
  return {data.subset(train_idx), data.subset(test_idx)};
}

void write_instances_csv(const std::string& path, const Dataset& data) {
  std::vector<std::string> header = {"vehicle_id", "frame", "label"};
  header.insert(header.end(), data.feature_names.begin(), data.feature_names.end());
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<std::string> row = {CsvWriter::format(data.vehicle_ids[i]),
                                    CsvWriter::format(data.frames[i]),
                                    to_string(data.labels[i])};
    for (double v : data.features[i]) row.push_back(CsvWriter::format(v));
    w.row(row);
  }
}

Dataset read_instances_csv(const std::string& path) {
  CsvReader reader(path);
  Dataset data;
  const int c_vid = reader.column("vehicle_id");
  const int c_frame = reader.column("frame");
  const int c_label = reader.column("label");
  if (c_vid < 0 || c_frame < 0 || c_label < 0) {
    throw SchemaError("instances file misses vehicle_id/frame/label columns: " + path);
  }
  for (std::size_t c = 0; c < reader.header().size(); ++c) {
    const std::string& name = reader.header()[c];
    if (name == "vehicle_id" || name == "frame" || name == "label") continue;
    data.feature_names.push_back(name);
  }
  reader.for_each_row([&](std::size_t row, const std::vector<std::string>& cells) {
    if (cells.size() != reader.header().size()) {
      throw ParseError("row " + std::to_string(row) + " width mismatch");
    }
    const std::string& lbl = cells[static_cast<std::size_t>(c_label)];
    if (lbl != "lane_keep" && lbl != "lane_change") {
      throw ParseError("unknown label '" + lbl + "' at row " + std::to_string(row));
    }
    FeatureVector f;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<int>(c) == c_vid || static_cast<int>(c) == c_frame ||
          static_cast<int>(c) == c_label) {
        continue;
      }
      f.push_back(parse_double(cells[c], row));
    }
    data.push(parse_long(cells[static_cast<std::size_t>(c_vid)], row),
              parse_long(cells[static_cast<std::size_t>(c_frame)], row),
              lbl == "lane_change" ? Label::lane_change : Label::lane_keep, std::move(f));
  });
  return data;
}

std::vector<LaneChangeEvent> extract_events(const std::vector<VehicleTrack>& tracks,
                                            const RoadGeometry& road, const EventParams& params) {
  std::vector<LaneChangeEvent> events;
  for (const auto& track : tracks) {
    if (track.size() < 2 || track.lateral_speed.size() != track.size()) continue;
    for (const Crossing& c : detect_crossings(track, road, params.merge_window)) {
      const InitiationResult init =
          find_initiation(track, c.frame, c.direction, params.lat_speed_threshold, params.min_run);
      LaneChangeEvent e;
      e.vehicle_id = track.vehicle_id;
      e.segment = track.segment;
      e.crossing_frame = c.frame;
      e.initiation_frame = init.frame;
      e.direction = c.direction;
      e.low_confidence = init.low_confidence;
      events.push_back(e);
    }
  }
  SceneIndex scenes(&tracks);
  apply_exclusions(events, road, scenes, params);
  return events;
}

std::vector<InstanceRef> assemble_instances(const std::vector<VehicleTrack>& tracks,
                                            const std::vector<LaneChangeEvent>& events,
                                            const EventParams& params, std::uint64_t seed,
                                            ExtractionReport* report) {
  ExtractionReport rep;
  std::map<std::pair<long, int>, const VehicleTrack*> track_of;
  for (const auto& t : tracks) track_of[{t.vehicle_id, t.segment}] = &t;

  Rng rng(seed);
  std::vector<InstanceRef> refs;
  for (const auto& e : events) {
    ++rep.events_total;
    if (e.excluded) {
      if (e.exclusion_reason == "mandatory_right") ++rep.excluded_mandatory;
      if (e.exclusion_reason == "ramp") ++rep.excluded_ramp;
      if (e.exclusion_reason == "headway") ++rep.excluded_headway;
      if (e.exclusion_reason == "indeterminate") ++rep.excluded_indeterminate;
      continue;
    }
    auto it = track_of.find({e.vehicle_id, e.segment});
    if (it == track_of.end()) continue;
    ++rep.events_retained;

    refs.push_back({e.vehicle_id, e.segment, e.initiation_frame, Label::lane_change,
                    e.crossing_frame});

    bool short_window = false;
    const auto keeps = sample_lane_keep(*it->second, e.initiation_frame, params.keep_per_event,
                                        rng, params.keep_warmup, params.keep_margin,
                                        &short_window);
    if (short_window) ++rep.short_keep_windows;
    for (long f : keeps) {
      refs.push_back({e.vehicle_id, e.segment, f, Label::lane_keep, e.crossing_frame});
    }
  }
  if (report) *report = rep;
  return refs;
}

void write_instance_refs_csv(const std::string& path, const std::vector<InstanceRef>& refs) {
  CsvWriter w(path, {"vehicle_id", "segment", "frame", "label", "crossing_frame"});
  for (const auto& r : refs) {
    w.row({CsvWriter::format(r.vehicle_id), CsvWriter::format(static_cast<long>(r.segment)),
           CsvWriter::format(r.frame), to_string(r.label), CsvWriter::format(r.crossing_frame)});
  }
}

std::vector<InstanceRef> read_instance_refs_csv(const std::string& path) {
  CsvReader reader(path);
  const int c_vid = reader.column("vehicle_id");
  const int c_seg = reader.column("segment");
  const int c_frame = reader.column("frame");
  const int c_label = reader.column("label");
  const int c_cross = reader.column("crossing_frame");
  if (c_vid < 0 || c_seg < 0 || c_frame < 0 || c_label < 0 || c_cross < 0) {
    throw SchemaError("instance refs file misses required columns: " + path);
  }
  std::vector<InstanceRef> refs;
  reader.for_each_row([&](std::size_t row, const std::vector<std::string>& cells) {
    InstanceRef r;
    r.vehicle_id = parse_long(cells[static_cast<std::size_t>(c_vid)], row);
    r.segment = static_cast<int>(parse_long(cells[static_cast<std::size_t>(c_seg)], row));
    r.frame = parse_long(cells[static_cast<std::size_t>(c_frame)], row);
    r.label = cells[static_cast<std::size_t>(c_label)] == "lane_change" ? Label::lane_change
                                                                        : Label::lane_keep;
    r.crossing_frame = parse_long(cells[static_cast<std::size_t>(c_cross)], row);
    refs.push_back(r);
  });
  return refs;
}

Dataset featurize_instances(const std::vector<VehicleTrack>& tracks, const RoadGeometry& road,
                            const std::vector<InstanceRef>& refs, const FeatureConfig& fcfg,
                            ExtractionReport* report) {
  Dataset data;
  data.feature_names = feature_names(fcfg.n_past);
  SceneIndex scenes(&tracks);

  // Group requested frames per (vehicle, segment) so each track is walked once.
  std::map<std::pair<long, int>, std::vector<const InstanceRef*>> wanted;
  for (const auto& r : refs) wanted[{r.vehicle_id, r.segment}].push_back(&r);

  long skipped = 0;
  for (const auto& track : tracks) {
    auto it = wanted.find({track.vehicle_id, track.segment});
    if (it == wanted.end()) continue;

    // Per-frame base features with the utility state carried along.
    std::vector<FeatureVector> series;
    series.reserve(track.size());
    UtilityState utility;
    for (std::size_t k = 0; k < track.size(); ++k) {
      const long frame = track.samples[k].frame;
      const AgentState ego = agent_from_sample(track, k);
      const auto snapshot = scenes.snapshot(frame, track.vehicle_id);
      const NeighborSet n =
          identify_neighbors(snapshot, ego, road, TargetLane::current, fcfg.sensing_range);
      utility = utility_step(utility, n, frame);
      series.push_back(featurize(n, ego.speed, utility, fcfg));
    }

    std::vector<const InstanceRef*> sorted_refs = it->second;
    std::sort(sorted_refs.begin(), sorted_refs.end(),
              [](const InstanceRef* a, const InstanceRef* b) { return a->frame < b->frame; });
    for (const InstanceRef* r : sorted_refs) {
      if (!track.covers(r->frame)) {
        ++skipped;
        continue;
      }
      const std::size_t k = track.index_of(r->frame);
      if (static_cast<long>(k) < static_cast<long>(fcfg.n_past) * fcfg.step_gap) {
        ++skipped;
        continue;
      }
      data.push(r->vehicle_id, r->frame, r->label,
                history_stack(series, k, fcfg.n_past, fcfg.step_gap));
    }
  }
  if (report) report->skipped_no_history = skipped;
  return data;
}

Dataset build_dataset(const std::vector<VehicleTrack>& tracks, const RoadGeometry& road,
                      const EventParams& eparams, const FeatureConfig& fcfg, std::uint64_t seed,
                      ExtractionReport* report, std::vector<LaneChangeEvent>* events_out) {
  const auto events = extract_events(tracks, road, eparams);
  ExtractionReport rep;
  const auto refs = assemble_instances(tracks, events, eparams, seed, &rep);
  Dataset data = featurize_instances(tracks, road, refs, fcfg, &rep);
  if (report) *report = rep;
  if (events_out) *events_out = events;
  return data;
}

}  // namespace lanekit
