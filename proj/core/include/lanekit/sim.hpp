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

#ifndef LANEKIT_SIM_HPP
#define LANEKIT_SIM_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lanekit/forest.hpp"
#include "lanekit/planner.hpp"

namespace lanekit {

/// Replay scenario: every vehicle except the ego follows its recording.
struct Scenario {
  long ego_id = 0;
  long start_frame = 0;
  long end_frame = 0;
  std::vector<VehicleTrack> tracks;
  RoadGeometry road;
  std::optional<std::array<double, 4>> ego_init;  ///< x, y, psi, v override
};

struct PlannerParams {
  int horizon = 30;
  double ts = 0.1;
  double wheelbase = 2.7;
  double q_y = 1e3;
  double q_psi = 1e-2;
  double q_v = 1e-2;
  double r_steer = 1e1;
  double r_accel = 1e-2;
  double t_scale = 1e3;  ///< offset weight T = t_scale * P
  StateBounds x_bounds;
  InputBounds u_bounds;
  TargetParams target;
  int qp_max_iter = 500;
  double qp_tol = 1e-6;
  double v0_min = 0.5;  ///< linearisation speed floor (m/s)
};

struct SimParams {
  double threshold = 0.8;      ///< lane-change commit probability
  double completion_tol = 0.2; ///< |y - y_hat| below this completes the manoeuvre
  FeatureConfig features;
  PlannerParams planner;
};

/// Kinematic bicycle used as the simulation plant.
struct PlantState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double v = 0.0;
};

PlantState bicycle_step(const PlantState& s, double steer, double accel, double ts,
                        double wheelbase);

struct SimStep {
  long frame = 0;
  FeatureVector features;
  std::array<double, 2> probs{};  ///< {p(lane_keep), p(lane_change)}
  Manoeuvre decision = Manoeuvre::lane_keep;
  bool committed = false;
  int target_lane = 0;
  TargetPose target;
  double steer = 0.0;
  double accel = 0.0;
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double v = 0.0;
  SolveStatus status = SolveStatus::optimal;
  bool fallback = false;   ///< brake fallback applied (solver not optimal)
  bool escalated = false;  ///< ego outside the collision set; planes reduced
  double min_plane_margin = 0.0;  ///< min over used planes of -eval at (x, y)
  double objective = 0.0;
  bool ghost_conflict = false;  ///< body overlap with a replayed vehicle
};

/// Closed loop at the recording rate: featurize, classify, commit at the
/// probability threshold (latched until |y - y_hat| < completion_tol),
/// generate the target, build the collision set, solve the MPC, and apply
/// the first input to the bicycle plant. The ego never reads its own
/// recorded future.
std::vector<SimStep> replay_simulate(const Scenario& scenario, const Forest& forest,
                                     const SimParams& params);

struct ComparisonMetrics {
  double lateral_rmse = 0.0;
  double initiation_offset_s = 0.0;  ///< sim minus human, NaN when undefined
  double completion_offset_s = 0.0;
  double max_abs_accel = 0.0;
  double max_abs_steer = 0.0;
  long common_frames = 0;
};

ComparisonMetrics compare_to_ground_truth(const std::vector<SimStep>& log,
                                          const VehicleTrack& ground_truth,
                                          const RoadGeometry& road,
                                          double completion_tol = 0.2,
                                          double lat_speed_threshold = 0.1);

struct SweepPoint {
  double value = 0.0;
  double p_keep = 0.0;
  double p_change = 0.0;
};

/// predict_proba over base with feature `index` swept from lo to hi.
std::vector<SweepPoint> sensitivity_sweep(const Forest& forest, FeatureVector base, int index,
                                          double lo, double hi, double step);

void write_simlog_csv(const std::string& path, const std::vector<SimStep>& log);
void write_simlog_json(const std::string& path, const std::vector<SimStep>& log);
void write_sweep_csv(const std::string& path, const std::string& feature,
                     const std::vector<SweepPoint>& curve);
/// Side-by-side trajectory of the simulated ego and the recorded driver.
void write_overlay_csv(const std::string& path, const std::vector<SimStep>& log,
                       const VehicleTrack& ground_truth);

}  // namespace lanekit

#endif  // LANEKIT_SIM_HPP
