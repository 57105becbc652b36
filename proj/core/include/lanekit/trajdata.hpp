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

#ifndef LANEKIT_TRAJDATA_HPP
#define LANEKIT_TRAJDATA_HPP

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lanekit/road.hpp"

namespace lanekit {

/// One recorded trajectory row. Positions are the vehicle centre in the
/// road-aligned frame (x along the road, y across, increasing leftward).
struct RawSample {
  long vehicle_id = 0;
  long frame = 0;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  int lane_id = 0;
  double length = 4.5;
  double width = 1.8;
};

/// Uniformly sampled trace of one vehicle. lateral_speed/longitudinal_speed
/// are filled by the smoothing pipeline; empty until then.
struct VehicleTrack {
  long vehicle_id = 0;
  int segment = 0;  ///< > 0 when a recording gap forced a split
  double ts = 0.1;  ///< sample period (s)
  std::vector<RawSample> samples;
  std::vector<double> lateral_speed;
  std::vector<double> longitudinal_speed;

  std::size_t size() const { return samples.size(); }
  long first_frame() const { return samples.empty() ? 0 : samples.front().frame; }
  long last_frame() const { return samples.empty() ? 0 : samples.back().frame; }
  bool covers(long frame) const { return frame >= first_frame() && frame <= last_frame(); }
  /// Index of `frame` in samples; track is frame-contiguous by construction.
  std::size_t index_of(long frame) const;
  const RawSample& at_frame(long frame) const { return samples[index_of(frame)]; }
};

/// Column mapping plus unit handling for trajectory CSV files.
struct CsvSchema {
  std::map<std::string, std::string> columns;  ///< field name -> csv header
  double unit_scale = 1.0;     ///< applied to x, y, speed, length, width (0.3048 for feet)
  double lateral_sign = 1.0;   ///< +1 if the source lateral axis already points left
  double lateral_offset = 0.0; ///< added to y after sign/scale
  bool position_is_front_centre = false;  ///< shift x back by length/2 on ingest

  static CsvSchema native();
  static CsvSchema ngsim();
};

struct LoadReport {
  long rows_read = 0;
  long duplicates_dropped = 0;
  long gaps_filled = 0;   ///< interpolated frames
  long tracks_split = 0;  ///< extra segments created by large gaps
};

/// Reads tracks from a CSV file. Duplicate (vehicle, frame) rows collapse to
/// the first occurrence; interior gaps of at most `max_gap_fill` frames are
/// linearly interpolated, larger gaps split the track into segments.
std::vector<VehicleTrack> load_tracks(const std::string& path, const CsvSchema& schema,
                                      double ts_data, LoadReport* report = nullptr,
                                      int max_gap_fill = 5);

/// Writes tracks using the native column set plus a lateral_speed column.
void write_tracks_csv(const std::string& path, const std::vector<VehicleTrack>& tracks);
std::vector<VehicleTrack> read_tracks_csv(const std::string& path, double ts_data);

/// Extended Kalman filter settings for the bicycle-model smoother. With no
/// recorded steering the heading evolves as a random walk, so the wheelbase
/// only parameterises downstream consumers of the config.
struct EkfConfig {
  double wheelbase = 2.7;
  std::array<double, 4> process_noise = {0.05, 0.05, 0.01, 0.2};   ///< x, y, heading, speed
  std::array<double, 2> measurement_noise = {0.25, 0.25};          ///< x, y
  std::array<double, 4> initial_covariance = {1.0, 1.0, 0.1, 1.0};

  void validate() const;
};

/// Replaces positions and speeds by filtered estimates from a kinematic
/// bicycle process model with state (x, y, heading, speed) and position
/// measurements. Track length and time base are preserved exactly.
VehicleTrack ekf_smooth(const VehicleTrack& track, const EkfConfig& cfg);

/// s[0] = x[0]; s[k] = alpha * x[k] + (1 - alpha) * s[k-1].
std::vector<double> exp_smooth(std::span<const double> series, double alpha);

/// Central finite difference of y over time, one-sided at the endpoints.
/// Positive values point leftward (toward decreasing lane id).
std::vector<double> lateral_speed(const VehicleTrack& track);

/// Full smoothing pass: EKF on positions, finite-difference lateral speed,
/// exponential smoothing (factor `alpha`) applied to the lateral-speed
/// signal only.
VehicleTrack smooth_track(const VehicleTrack& track, const EkfConfig& cfg, double alpha = 0.3);

}  // namespace lanekit

#endif  // LANEKIT_TRAJDATA_HPP
