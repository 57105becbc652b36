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

#include "lanekit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "lanekit/csv.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/events.hpp"
#include "nlohmann/json.hpp"

namespace lanekit {

PlantState bicycle_step(const PlantState& s, double steer, double accel, double ts,
                        double wheelbase) {
  PlantState n;
  n.x = s.x + ts * s.v * std::cos(s.psi);
  n.y = s.y + ts * s.v * std::sin(s.psi);
  n.psi = s.psi + ts * (s.v / wheelbase) * std::tan(steer);
  n.v = std::max(0.0, s.v + ts * accel);
  return n;
}

namespace {

bool boxes_overlap(const AgentState& a, const AgentState& b) {
  return std::abs(a.x - b.x) < 0.5 * (a.length + b.length) &&
         std::abs(a.y - b.y) < 0.5 * (a.width + b.width);
}

FeatureVector stack_with_padding(const std::vector<FeatureVector>& series, int n_past,
                                 int step_gap) {
  // Early frames reuse the oldest sample so the vector keeps its full width.
  const std::size_t t = series.size() - 1;
  FeatureVector out;
  out.reserve(series.back().size() * static_cast<std::size_t>(n_past + 1));
  for (int j = 0; j <= n_past; ++j) {
    const long at = std::max<long>(0, static_cast<long>(t) - static_cast<long>(j) * step_gap);
    const FeatureVector& block = series[static_cast<std::size_t>(at)];
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

}  // namespace

std::vector<SimStep> replay_simulate(const Scenario& scenario, const Forest& forest,
                                     const SimParams& params) {
  if (scenario.end_frame <= scenario.start_frame) {
    throw ParamError("scenario: end frame must exceed start frame");
  }
  const VehicleTrack* ego_track = nullptr;
  for (const auto& t : scenario.tracks) {
    if (t.vehicle_id == scenario.ego_id && t.covers(scenario.start_frame)) {
      ego_track = &t;
      break;
    }
  }
  if (!ego_track) {
    throw LookupError("scenario: ego vehicle " + std::to_string(scenario.ego_id) +
                      " absent at the start frame");
  }
  const std::size_t expected_dim =
      static_cast<std::size_t>(kFeatureCount) * static_cast<std::size_t>(params.features.n_past + 1);
  if (forest.dim() != expected_dim) {
    throw ShapeError("scenario: forest expects " + std::to_string(forest.dim()) +
                     " features but the configuration produces " + std::to_string(expected_dim));
  }

  const RoadGeometry& road = scenario.road;
  const PlannerParams& pp = params.planner;
  SceneIndex scenes(&scenario.tracks);

  PlantState ego;
  {
    const RawSample& s0 = ego_track->at_frame(scenario.start_frame);
    ego = {s0.x, s0.y, 0.0, s0.speed};
    if (scenario.ego_init) {
      ego = {(*scenario.ego_init)[0], (*scenario.ego_init)[1], (*scenario.ego_init)[2],
             (*scenario.ego_init)[3]};
    }
  }
  const double ego_length = ego_track->samples.front().length;
  const double ego_width = ego_track->samples.front().width;

  const Eigen::Matrix3d Q = Eigen::Vector3d(pp.q_y, pp.q_psi, pp.q_v).asDiagonal();
  const Eigen::Matrix2d R = Eigen::Vector2d(pp.r_steer, pp.r_accel).asDiagonal();

  std::vector<SimStep> log;
  std::vector<FeatureVector> series;
  UtilityState utility;
  bool committed = false;
  int committed_lane = 0;
  int departed_lane = 0;

  for (long frame = scenario.start_frame; frame <= scenario.end_frame; ++frame) {
    AgentState ego_agent;
    ego_agent.vehicle_id = scenario.ego_id;
    ego_agent.x = ego.x;
    ego_agent.y = ego.y;
    ego_agent.speed = ego.v * std::cos(ego.psi);
    ego_agent.length = ego_length;
    ego_agent.width = ego_width;
    ego_agent.lane_id = road.lane_id_at(ego.y);

    // Manoeuvre completion test against the latched target lane.
    if (committed && std::abs(ego.y - road.lane_centre(committed_lane)) < params.completion_tol) {
      committed = false;
    }

    const auto snapshot = scenes.snapshot(frame, scenario.ego_id);
    const NeighborSet neighbors =
        identify_neighbors(snapshot, ego_agent, road, TargetLane::current,
                           params.features.sensing_range);
    utility = utility_step(utility, neighbors, frame);
    series.push_back(featurize(neighbors, ego_agent.speed, utility, params.features));
    const FeatureVector fvec = params.features.n_past > 0
                                   ? stack_with_padding(series, params.features.n_past,
                                                        params.features.step_gap)
                                   : series.back();
    const auto probs = predict_proba(forest, fvec);

    if (!committed && probs[1] > params.threshold && ego_agent.lane_id > 1) {
      committed = true;
      committed_lane = ego_agent.lane_id - 1;
      departed_lane = ego_agent.lane_id;
    }
    const Manoeuvre decision = committed ? Manoeuvre::lane_change : Manoeuvre::lane_keep;

    SimStep step;
    step.frame = frame;
    step.features = fvec;
    step.probs = probs;
    step.x = ego.x;
    step.y = ego.y;
    step.psi = ego.psi;
    step.v = ego.v;

    TargetPose target =
        target_generation(decision, snapshot, ego_agent, road, pp.target,
                          committed ? std::optional<int>(committed_lane) : std::nullopt);
    CollisionSet set = build_collision_set(
        snapshot, ego_agent, road, decision, pp.target,
        committed ? std::optional<int>(committed_lane) : std::nullopt,
        committed ? std::optional<int>(departed_lane) : std::nullopt);

    if (!set.ego_inside) {
      // Environment infeasible at the current position: emergency-stop
      // target along the current lane, with the violated planes dropped.
      // The latch ends; this counts as a declared fallback step.
      step.escalated = true;
      committed = false;
      set = set.satisfied_at(ego.x, ego.y);
      target.y_hat = road.lane_centre(ego_agent.lane_id);
      target.psi_hat = 0.0;
      target.v_hat = 0.0;
    }
    step.target = target;

    const PlantModel model = build_model(std::max(ego.v, pp.v0_min), pp.wheelbase, pp.ts,
                                         pp.x_bounds, pp.u_bounds);
    MpcWeights weights;
    weights.Q = Q;
    weights.R = R;
    weights.P = solve_dare(model.A, model.B, Q, R);
    weights.T_w = pp.t_scale * weights.P;
    weights.horizon = pp.horizon;

    const Eigen::Vector3d xi0(ego.y, ego.psi, ego.v);
    const MpcSolution sol =
        solve_mpc(model, weights, xi0, ego.x, target, set, pp.qp_max_iter, pp.qp_tol);
    step.status = sol.status;
    step.objective = sol.objective;

    double steer = 0.0;
    double accel = 0.0;
    if (sol.status == SolveStatus::optimal) {
      steer = sol.first_input()(0);
      accel = sol.first_input()(1);
    } else {
      // Brake hard and steer toward the lane centre with the LQR gain.
      step.fallback = true;
      committed = false;
      const Eigen::MatrixXd K = lqr_gain(model.A, model.B, Q, R);
      const Eigen::Vector3d ref(road.lane_centre(ego_agent.lane_id), 0.0, ego.v);
      const Eigen::Vector2d u_fb = -K * (xi0 - ref);
      steer = std::clamp(u_fb(0), pp.u_bounds.steer.lo, pp.u_bounds.steer.hi);
      accel = pp.u_bounds.accel.lo;
    }
    step.fallback = step.fallback || step.escalated;
    step.steer = steer;
    step.accel = accel;
    step.committed = committed;
    step.decision = committed ? Manoeuvre::lane_change : Manoeuvre::lane_keep;
    step.target_lane = committed ? committed_lane : ego_agent.lane_id;

    double margin = std::numeric_limits<double>::infinity();
    for (const auto& p : set.planes) {
      margin = std::min(margin, -p.base.eval(ego.x, ego.y));
    }
    step.min_plane_margin = margin;

    for (const auto& other : snapshot) {
      if (boxes_overlap(ego_agent, other)) {
        step.ghost_conflict = true;
        break;
      }
    }

    log.push_back(std::move(step));
    ego = bicycle_step(ego, steer, accel, pp.ts, pp.wheelbase);
  }
  return log;
}

ComparisonMetrics compare_to_ground_truth(const std::vector<SimStep>& log,
                                          const VehicleTrack& ground_truth,
                                          const RoadGeometry& road, double completion_tol,
                                          double lat_speed_threshold) {
  ComparisonMetrics m;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.initiation_offset_s = nan;
  m.completion_offset_s = nan;

  double sq = 0.0;
  for (const auto& step : log) {
    if (!ground_truth.covers(step.frame)) continue;
    const RawSample& gt = ground_truth.at_frame(step.frame);
    sq += (step.y - gt.y) * (step.y - gt.y);
    ++m.common_frames;
    m.max_abs_accel = std::max(m.max_abs_accel, std::abs(step.accel));
    m.max_abs_steer = std::max(m.max_abs_steer, std::abs(step.steer));
  }
  if (m.common_frames == 0) throw ParamError("compare: no overlapping frames");
  m.lateral_rmse = std::sqrt(sq / static_cast<double>(m.common_frames));

  const double ts = ground_truth.ts;

  // Simulated manoeuvre timing from the commit latch.
  long sim_init = -1;
  long sim_done = -1;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log[i].committed && sim_init < 0) sim_init = log[i].frame;
    if (sim_init >= 0 && !log[i].committed && sim_done < 0 && log[i].frame > sim_init) {
      sim_done = log[i].frame;
    }
  }

  // Human timing from the recorded track.
  long human_init = -1;
  long human_done = -1;
  if (ground_truth.lateral_speed.size() == ground_truth.size()) {
    const auto crossings = detect_crossings(ground_truth, road);
    for (const auto& c : crossings) {
      if (c.frame < log.front().frame || c.frame > log.back().frame) continue;
      const auto init = find_initiation(ground_truth, c.frame, c.direction, lat_speed_threshold);
      human_init = init.frame;
      const double target_centre = road.lane_centre(road.lane_id_at(
          c.marking_y + (c.direction == Direction::left ? 0.5 : -0.5) * road.lane_width));
      for (long f = c.frame; f <= ground_truth.last_frame(); ++f) {
        if (std::abs(ground_truth.at_frame(f).y - target_centre) < completion_tol) {
          human_done = f;
          break;
        }
      }
      break;  // first crossing inside the window
    }
  }

  if (sim_init >= 0 && human_init >= 0) {
    m.initiation_offset_s = static_cast<double>(sim_init - human_init) * ts;
  }
  if (sim_done >= 0 && human_done >= 0) {
    m.completion_offset_s = static_cast<double>(sim_done - human_done) * ts;
  }
  return m;
}

std::vector<SweepPoint> sensitivity_sweep(const Forest& forest, FeatureVector base, int index,
                                          double lo, double hi, double step) {
  if (lo >= hi || step <= 0.0) throw ParamError("sweep: need lo < hi and step > 0");
  if (index < 0 || static_cast<std::size_t>(index) >= base.size()) {
    throw LookupError("sweep: feature index outside the vector");
  }
  std::vector<SweepPoint> curve;
  for (double v = lo; v <= hi + 1e-12; v += step) {
    base[static_cast<std::size_t>(index)] = v;
    const auto p = predict_proba(forest, base);
    curve.push_back({v, p[0], p[1]});
  }
  return curve;
}

void write_simlog_csv(const std::string& path, const std::vector<SimStep>& log) {
  CsvWriter w(path, {"frame", "x", "y", "psi", "v", "steer", "accel", "p_keep", "p_change",
                     "decision", "committed", "target_lane", "y_hat", "v_hat", "status",
                     "fallback", "escalated", "min_plane_margin", "objective",
                     "ghost_conflict"});
  for (const auto& s : log) {
    w.row({CsvWriter::format(s.frame), CsvWriter::format(s.x), CsvWriter::format(s.y),
           CsvWriter::format(s.psi), CsvWriter::format(s.v), CsvWriter::format(s.steer),
           CsvWriter::format(s.accel), CsvWriter::format(s.probs[0]),
           CsvWriter::format(s.probs[1]),
           s.decision == Manoeuvre::lane_change ? "lane_change" : "lane_keep",
           CsvWriter::format(static_cast<long>(s.committed)),
           CsvWriter::format(static_cast<long>(s.target_lane)), CsvWriter::format(s.target.y_hat),
           CsvWriter::format(s.target.v_hat), to_string(s.status),
           CsvWriter::format(static_cast<long>(s.fallback)),
           CsvWriter::format(static_cast<long>(s.escalated)),
           CsvWriter::format(s.min_plane_margin), CsvWriter::format(s.objective),
           CsvWriter::format(static_cast<long>(s.ghost_conflict))});
  }
}

void write_simlog_json(const std::string& path, const std::vector<SimStep>& log) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : log) {
    steps.push_back({{"frame", s.frame},
                     {"x", s.x},
                     {"y", s.y},
                     {"psi", s.psi},
                     {"v", s.v},
                     {"steer", s.steer},
                     {"accel", s.accel},
                     {"p_keep", s.probs[0]},
                     {"p_change", s.probs[1]},
                     {"decision", s.decision == Manoeuvre::lane_change ? "lane_change"
                                                                       : "lane_keep"},
                     {"committed", s.committed},
                     {"target_lane", s.target_lane},
                     {"y_hat", s.target.y_hat},
                     {"v_hat", s.target.v_hat},
                     {"status", to_string(s.status)},
                     {"fallback", s.fallback},
                     {"escalated", s.escalated},
                     {"min_plane_margin", s.min_plane_margin},
                     {"objective", s.objective},
                     {"ghost_conflict", s.ghost_conflict}});
  }
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write sim log to " + path);
  out << nlohmann::json{{"format", "lanekit-simlog"}, {"version", 1}, {"steps", steps}}.dump(1)
      << '\n';
}

void write_sweep_csv(const std::string& path, const std::string& feature,
                     const std::vector<SweepPoint>& curve) {
  CsvWriter w(path, {feature, "p_lane_keep", "p_lane_change"});
  for (const auto& p : curve) {
    w.row({CsvWriter::format(p.value), CsvWriter::format(p.p_keep),
           CsvWriter::format(p.p_change)});
  }
}

void write_overlay_csv(const std::string& path, const std::vector<SimStep>& log,
                       const VehicleTrack& ground_truth) {
  CsvWriter w(path, {"frame", "sim_x", "sim_y", "sim_v", "gt_x", "gt_y", "gt_v"});
  for (const auto& s : log) {
    if (!ground_truth.covers(s.frame)) continue;
    const RawSample& gt = ground_truth.at_frame(s.frame);
    w.row({CsvWriter::format(s.frame), CsvWriter::format(s.x), CsvWriter::format(s.y),
           CsvWriter::format(s.v), CsvWriter::format(gt.x), CsvWriter::format(gt.y),
           CsvWriter::format(gt.speed)});
  }
}

}  // namespace lanekit
