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

#include "lanekit/trajdata.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "lanekit/csv.hpp"
#include "lanekit/errors.hpp"

namespace lanekit {

std::size_t VehicleTrack::index_of(long frame) const {
  if (!covers(frame)) {
    throw LookupError("frame " + std::to_string(frame) + " outside track of vehicle " +
                      std::to_string(vehicle_id));
  }
  return static_cast<std::size_t>(frame - first_frame());
}

CsvSchema CsvSchema::native() {
  CsvSchema s;
  s.columns = {{"vehicle_id", "vehicle_id"}, {"frame", "frame"},   {"x", "x"},
               {"y", "y"},                   {"speed", "speed"},   {"lane_id", "lane_id"},
               {"length", "length"},         {"width", "width"}};
  return s;
}

CsvSchema CsvSchema::ngsim() {
  CsvSchema s;
  s.columns = {{"vehicle_id", "Vehicle_ID"}, {"frame", "Frame_ID"}, {"x", "Local_Y"},
               {"y", "Local_X"},             {"speed", "v_Vel"},    {"lane_id", "Lane_ID"},
               {"length", "v_Length"},       {"width", "v_Width"}};
  s.unit_scale = 0.3048;        // feet to metres
  s.lateral_sign = -1.0;        // source lateral axis points right
  s.position_is_front_centre = true;
  return s;
}

namespace {

RawSample lerp_sample(const RawSample& a, const RawSample& b, long frame) {
  const double t = static_cast<double>(frame - a.frame) / static_cast<double>(b.frame - a.frame);
  RawSample s = a;
  s.frame = frame;
  s.x = a.x + t * (b.x - a.x);
  s.y = a.y + t * (b.y - a.y);
  s.speed = a.speed + t * (b.speed - a.speed);
  s.lane_id = t < 0.5 ? a.lane_id : b.lane_id;
  return s;
}

}  // namespace

std::vector<VehicleTrack> load_tracks(const std::string& path, const CsvSchema& schema,
                                      double ts_data, LoadReport* report, int max_gap_fill) {
  if (ts_data <= 0.0) throw ParamError("ts_data must be > 0");

  CsvReader reader(path);
  if (reader.empty()) return {};

  const char* fields[] = {"vehicle_id", "frame", "x", "y", "speed", "lane_id", "length", "width"};
  std::map<std::string, int> col;
  for (const char* f : fields) {
    auto it = schema.columns.find(f);
    if (it == schema.columns.end()) throw SchemaError(std::string("schema misses field ") + f);
    const int c = reader.column(it->second);
    if (c < 0) throw SchemaError("mapped column '" + it->second + "' not found in " + path);
    col[f] = c;
  }

  LoadReport rep;
  std::map<long, std::vector<RawSample>> per_vehicle;
  rep.rows_read = static_cast<long>(
      reader.for_each_row([&](std::size_t row, const std::vector<std::string>& cells) {
        std::size_t needed = 0;
        for (const auto& [f, c] : col) needed = std::max(needed, static_cast<std::size_t>(c) + 1);
        if (cells.size() < needed) {
          throw ParseError("row " + std::to_string(row) + " has too few columns");
        }
        RawSample s;
        s.vehicle_id = parse_long(cells[col["vehicle_id"]], row);
        s.frame = parse_long(cells[col["frame"]], row);
        s.x = parse_double(cells[col["x"]], row) * schema.unit_scale;
        s.y = parse_double(cells[col["y"]], row) * schema.unit_scale * schema.lateral_sign +
              schema.lateral_offset;
        s.speed = parse_double(cells[col["speed"]], row) * schema.unit_scale;
        s.lane_id = static_cast<int>(parse_long(cells[col["lane_id"]], row));
        s.length = parse_double(cells[col["length"]], row) * schema.unit_scale;
        s.width = parse_double(cells[col["width"]], row) * schema.unit_scale;
        if (s.length <= 0.0 || s.width <= 0.0) {
          throw ParseError("non-positive vehicle size at row " + std::to_string(row));
        }
        if (schema.position_is_front_centre) s.x -= 0.5 * s.length;
        per_vehicle[s.vehicle_id].push_back(s);
      }));

  std::vector<VehicleTrack> tracks;
  for (auto& [vid, samples] : per_vehicle) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const RawSample& a, const RawSample& b) { return a.frame < b.frame; });

    // Collapse duplicate frames to the first occurrence.
    std::vector<RawSample> unique;
    for (const auto& s : samples) {
      if (!unique.empty() && unique.back().frame == s.frame) {
        ++rep.duplicates_dropped;
        continue;
      }
      unique.push_back(s);
    }

    VehicleTrack track;
    track.vehicle_id = vid;
    track.ts = ts_data;
    int segment = 0;
    for (std::size_t i = 0; i < unique.size(); ++i) {
      if (!track.samples.empty()) {
        const long gap = unique[i].frame - track.samples.back().frame - 1;
        if (gap > max_gap_fill) {
          track.segment = segment;
          tracks.push_back(std::move(track));
          track = VehicleTrack{};
          track.vehicle_id = vid;
          track.ts = ts_data;
          track.segment = ++segment;
          ++rep.tracks_split;
        } else if (gap > 0) {
          const RawSample prev = track.samples.back();
          for (long f = prev.frame + 1; f < unique[i].frame; ++f) {
            track.samples.push_back(lerp_sample(prev, unique[i], f));
            ++rep.gaps_filled;
          }
        }
      }
      track.samples.push_back(unique[i]);
    }
    if (!track.samples.empty()) {
      track.segment = segment;
      tracks.push_back(std::move(track));
    }
  }

  if (report) *report = rep;
  return tracks;
}

void write_tracks_csv(const std::string& path, const std::vector<VehicleTrack>& tracks) {
  CsvWriter w(path, {"vehicle_id", "frame", "x", "y", "speed", "lane_id", "length", "width",
                     "lateral_speed"});
  for (const auto& t : tracks) {
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      const RawSample& s = t.samples[i];
      const double ls = i < t.lateral_speed.size() ? t.lateral_speed[i] : 0.0;
      w.row({CsvWriter::format(s.vehicle_id), CsvWriter::format(s.frame), CsvWriter::format(s.x),
             CsvWriter::format(s.y), CsvWriter::format(s.speed),
             CsvWriter::format(static_cast<long>(s.lane_id)), CsvWriter::format(s.length),
             CsvWriter::format(s.width), CsvWriter::format(ls)});
    }
  }
}

std::vector<VehicleTrack> read_tracks_csv(const std::string& path, double ts_data) {
  auto tracks = load_tracks(path, CsvSchema::native(), ts_data);
  CsvReader reader(path);
  const int c_vid = reader.column("vehicle_id");
  const int c_frame = reader.column("frame");
  const int c_ls = reader.column("lateral_speed");
  if (c_ls < 0) return tracks;
  std::map<long, VehicleTrack*> by_id;
  for (auto& t : tracks) by_id[t.vehicle_id] = &t;  // lateral_speed re-attach, segment 0 only
  for (auto& t : tracks) t.lateral_speed.assign(t.size(), 0.0);
  reader.for_each_row([&](std::size_t row, const std::vector<std::string>& cells) {
    const long vid = parse_long(cells[c_vid], row);
    const long frame = parse_long(cells[c_frame], row);
    auto it = by_id.find(vid);
    if (it != by_id.end() && it->second->covers(frame)) {
      it->second->lateral_speed[it->second->index_of(frame)] = parse_double(cells[c_ls], row);
    }
  });
  return tracks;
}

void EkfConfig::validate() const {
  if (wheelbase <= 0.0) throw ParamError("wheelbase must be > 0");
  for (double v : process_noise) {
    if (v <= 0.0) throw ParamError("process noise variances must be > 0");
  }
  for (double v : measurement_noise) {
    if (v <= 0.0) throw ParamError("measurement noise variances must be > 0");
  }
  for (double v : initial_covariance) {
    if (v <= 0.0) throw ParamError("initial covariance must be > 0");
  }
}

VehicleTrack ekf_smooth(const VehicleTrack& track, const EkfConfig& cfg) {
  cfg.validate();
  if (track.size() < 2) throw ParamError("ekf_smooth needs at least 2 samples");

  using Vec4 = Eigen::Vector4d;
  using Mat4 = Eigen::Matrix4d;
  const double ts = track.ts;

  // State (x, y, heading, speed). Heading and speed evolve as random walks;
  // position follows the bicycle kinematics with zero commanded steering.
  Vec4 s;
  const RawSample& s0 = track.samples[0];
  const RawSample& s1 = track.samples[1];
  const double dx0 = s1.x - s0.x;
  const double dy0 = s1.y - s0.y;
  s << s0.x, s0.y, (dx0 == 0.0 && dy0 == 0.0) ? 0.0 : std::atan2(dy0, dx0), s0.speed;

  Mat4 P = Mat4::Zero();
  Mat4 Qn = Mat4::Zero();
  for (int i = 0; i < 4; ++i) {
    P(i, i) = cfg.initial_covariance[i];
    Qn(i, i) = cfg.process_noise[i];
  }
  Eigen::Matrix2d Rn = Eigen::Matrix2d::Zero();
  Rn(0, 0) = cfg.measurement_noise[0];
  Rn(1, 1) = cfg.measurement_noise[1];
  Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
  H(0, 0) = 1.0;
  H(1, 1) = 1.0;

  VehicleTrack out = track;
  out.longitudinal_speed.assign(track.size(), 0.0);
  out.samples[0].x = s(0);
  out.samples[0].y = s(1);
  out.samples[0].speed = s(3);
  out.longitudinal_speed[0] = s(3) * std::cos(s(2));

  for (std::size_t k = 1; k < track.size(); ++k) {
    // Predict.
    const double psi = s(2);
    const double v = s(3);
    Vec4 pred;
    pred << s(0) + ts * v * std::cos(psi), s(1) + ts * v * std::sin(psi), psi, v;
    Mat4 F = Mat4::Identity();
    F(0, 2) = -ts * v * std::sin(psi);
    F(0, 3) = ts * std::cos(psi);
    F(1, 2) = ts * v * std::cos(psi);
    F(1, 3) = ts * std::sin(psi);
    s = pred;
    P = F * P * F.transpose() + Qn;

    // Update with the measured position.
    Eigen::Vector2d z(track.samples[k].x, track.samples[k].y);
    const Eigen::Matrix2d S = H * P * H.transpose() + Rn;
    Eigen::LLT<Eigen::Matrix2d> llt(S);
    if (llt.info() != Eigen::Success) {
      throw NumericError("singular innovation covariance at frame " +
                         std::to_string(track.samples[k].frame));
    }
    const Eigen::Matrix<double, 4, 2> K = P * H.transpose() * llt.solve(Eigen::Matrix2d::Identity());
    s = s + K * (z - H * s);
    P = (Mat4::Identity() - K * H) * P;

    out.samples[k].x = s(0);
    out.samples[k].y = s(1);
    out.samples[k].speed = s(3);
    out.longitudinal_speed[k] = s(3) * std::cos(s(2));
  }
  return out;
}

std::vector<double> exp_smooth(std::span<const double> series, double alpha) {
  if (series.empty()) throw ParamError("exp_smooth needs a non-empty series");
  if (!(alpha > 0.0) || alpha > 1.0) throw ParamError("alpha must lie in (0, 1]");
  std::vector<double> out(series.size());
  out[0] = series[0];
  for (std::size_t k = 1; k < series.size(); ++k) {
    out[k] = alpha * series[k] + (1.0 - alpha) * out[k - 1];
  }
  return out;
}

std::vector<double> lateral_speed(const VehicleTrack& track) {
  const std::size_t n = track.size();
  if (n < 2) throw ParamError("lateral_speed needs at least 2 samples");
  std::vector<double> out(n);
  const double ts = track.ts;
  out[0] = (track.samples[1].y - track.samples[0].y) / ts;
  out[n - 1] = (track.samples[n - 1].y - track.samples[n - 2].y) / ts;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    out[k] = (track.samples[k + 1].y - track.samples[k - 1].y) / (2.0 * ts);
  }
  return out;
}

VehicleTrack smooth_track(const VehicleTrack& track, const EkfConfig& cfg, double alpha) {
  VehicleTrack out = ekf_smooth(track, cfg);
  out.lateral_speed = exp_smooth(lateral_speed(out), alpha);
  return out;
}

}  // namespace lanekit
