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

#include "lanekit/planner.hpp"

#include <algorithm>
#include <cmath>

#include "lanekit/csv.hpp"
#include "lanekit/errors.hpp"
#include "lanekit/qp.hpp"

namespace lanekit {

PlantModel build_model(double v0, double wheelbase, double ts, const StateBounds& xb,
                       const InputBounds& ub) {
  if (v0 < 0.0 || wheelbase <= 0.0 || ts <= 0.0) {
    throw ParamError("build_model: v0 >= 0, wheelbase > 0, ts > 0 required");
  }
  PlantModel m;
  m.ts = ts;
  m.v0 = v0;
  m.wheelbase = wheelbase;
  m.x_bounds = xb;
  m.u_bounds = ub;
  m.A << 1.0, ts * v0, 0.0,
         0.0, 1.0, 0.0,
         0.0, 0.0, 1.0;
  m.B << 0.0, 0.0,
         ts * v0 / wheelbase, 0.0,
         0.0, ts;

  // Controllability: rank [B, AB, A^2B] must be 3, which fails iff v0 = 0
  // (the lateral channel decouples from every input).
  Eigen::Matrix<double, 3, 6> ctrb;
  ctrb << m.B, m.A * m.B, m.A * m.A * m.B;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ctrb);
  if (lu.rank() < 3) {
    throw NumericError("build_model: (A, B) not stabilisable, lateral channel uncontrollable");
  }
  return m;
}

Eigen::MatrixXd steady_state_basis(const PlantModel& model) {
  Eigen::MatrixXd M(3, 5);
  M << model.A - Eigen::Matrix3d::Identity(), model.B;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  Eigen::MatrixXd kernel = lu.kernel();
  // Canonicalise each column: largest-magnitude entry scaled to +1.
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    Eigen::Index at = 0;
    kernel.col(c).cwiseAbs().maxCoeff(&at);
    const double pivot = kernel(at, c);
    if (pivot != 0.0) kernel.col(c) /= pivot;
  }
  return kernel;
}

MpcWeights MpcWeights::defaults(const PlantModel& model) {
  MpcWeights w;
  w.Q = Eigen::Vector3d(1e3, 1e-2, 1e-2).asDiagonal();
  w.R = Eigen::Vector2d(1e1, 1e-2).asDiagonal();
  w.P = solve_dare(model.A, model.B, w.Q, w.R);
  w.T_w = 1e3 * w.P;
  w.horizon = 30;
  return w;
}

namespace {

struct LaneLead {
  bool present = false;
  double x_rear = 0.0;  ///< rear bumper position
  double gap = 0.0;     ///< bumper gap to the ego
  double speed = 0.0;
};

LaneLead nearest_ahead_in_lane(std::span<const AgentState> snapshot, const AgentState& ego,
                               const RoadGeometry& road, int lane, double sensing_range) {
  LaneLead lead;
  double best_dx = 0.0;
  for (const auto& other : snapshot) {
    if (other.vehicle_id == ego.vehicle_id) continue;
    if (road.lane_id_at(other.y) != lane) continue;
    const double dx = other.x - ego.x;
    if (dx < 0.0 || dx > sensing_range) continue;
    if (!lead.present || dx < best_dx) {
      best_dx = dx;
      lead.present = true;
      lead.x_rear = other.x - 0.5 * other.length;
      lead.gap = dx - 0.5 * (other.length + ego.length);
      lead.speed = other.speed;
    }
  }
  return lead;
}

}  // namespace

TargetPose target_generation(Manoeuvre decision, std::span<const AgentState> snapshot,
                             const AgentState& ego, const RoadGeometry& road,
                             const TargetParams& params, std::optional<int> committed_lane) {
  const int ego_lane = road.lane_id_at(ego.y);
  int desired = ego_lane;
  if (decision == Manoeuvre::lane_change) {
    desired = committed_lane.value_or(ego_lane - 1);
  }
  if (desired < 1 || desired > road.lane_count) {
    throw ParamError("target_generation: desired lane " + std::to_string(desired) +
                     " outside road");
  }

  TargetPose t;
  t.y_hat = road.lane_centre(desired);
  t.psi_hat = 0.0;  // straight-road heading

  const LaneLead lv = nearest_ahead_in_lane(snapshot, ego, road, desired, params.sensing_range);
  if (!lv.present) {
    t.v_hat = params.v_pref;
  } else if (lv.gap <= 0.0) {
    t.v_hat = 0.0;
  } else {
    t.v_hat = std::min(params.v_pref, lv.gap / params.t_hw);
  }
  t.v_hat = std::max(0.0, t.v_hat);
  return t;
}

CollisionSet CollisionSet::satisfied_at(double x, double y) const {
  CollisionSet out;
  out.ego_inside = true;
  for (const auto& p : planes) {
    if (p.base.eval(x, y) < 0.0) out.planes.push_back(p);
  }
  return out;
}

CollisionSet build_collision_set(std::span<const AgentState> snapshot, const AgentState& ego,
                                 const RoadGeometry& road, Manoeuvre decision,
                                 const TargetParams& params, std::optional<int> committed_lane,
                                 std::optional<int> departed_lane) {
  CollisionSet set;
  const int ego_lane = road.lane_id_at(ego.y);

  // Road edges with a margin for the vehicle body.
  set.planes.push_back({{0.0, 1.0, -(road.left_edge() - params.road_margin)}, 0.0, "road_left"});
  set.planes.push_back({{0.0, -1.0, road.right_edge() + params.road_margin}, 0.0, "road_right"});

  // Rear boundary behind the guarded lane's LV, extrapolated at its speed.
  // The clearance uses the LV speed, which equals the steady-following
  // headway distance and stays reachable during an approach.
  const int guard_lane =
      decision == Manoeuvre::lane_change ? committed_lane.value_or(ego_lane - 1) : ego_lane;
  if (guard_lane >= 1 && guard_lane <= road.lane_count) {
    const LaneLead lv = nearest_ahead_in_lane(snapshot, ego, road, guard_lane,
                                              params.sensing_range);
    if (lv.present) {
      const double clearance = params.gap_min + params.t_hw * std::max(0.0, lv.speed);
      set.planes.push_back(
          {{1.0, 0.0, -(lv.x_rear - 0.5 * ego.length - clearance)}, -lv.speed, "lv_rear"});
    }
  }

  // While still inside the departed lane mid-manoeuvre, keep a hard-gap
  // guard behind its lead vehicle; the headway term is dropped because the
  // speed targets no longer manage that lane.
  if (departed_lane && *departed_lane != guard_lane && ego_lane == *departed_lane) {
    const LaneLead lv = nearest_ahead_in_lane(snapshot, ego, road, *departed_lane,
                                              params.sensing_range);
    if (lv.present) {
      set.planes.push_back(
          {{1.0, 0.0, -(lv.x_rear - 0.5 * ego.length - params.gap_min)}, -lv.speed, "departed_lv"});
    }
  }

  // Side planes against occupied adjacent lanes.
  const auto lane_blocked = [&](int lane) {
    for (const auto& other : snapshot) {
      if (other.vehicle_id == ego.vehicle_id) continue;
      if (road.lane_id_at(other.y) != lane) continue;
      const double dx = other.x - ego.x;
      const double halves = 0.5 * (other.length + ego.length);
      if (dx >= 0.0 && dx - halves < params.gap_min) return true;
      const double rear_clear =
          params.gap_min + params.t_hw * std::max(0.0, other.speed - ego.speed);
      if (dx < 0.0 && -dx - halves < rear_clear) return true;
    }
    return false;
  };
  const int left_lane = ego_lane - 1;
  const int right_lane = ego_lane + 1;
  if (left_lane >= 1 && lane_blocked(left_lane)) {
    set.planes.push_back(
        {{0.0, 1.0, -(road.marking_left_of(ego_lane) - params.side_margin)}, 0.0, "side_left"});
  }
  if (right_lane <= road.lane_count && lane_blocked(right_lane)) {
    set.planes.push_back(
        {{0.0, -1.0, road.marking_right_of(ego_lane) + params.side_margin}, 0.0, "side_right"});
  }

  set.ego_inside = true;
  for (const auto& p : set.planes) {
    if (p.base.eval(ego.x, ego.y) >= 0.0) {
      set.ego_inside = false;
      break;
    }
  }
  return set;
}

MpcSolution solve_mpc(const PlantModel& model, const MpcWeights& weights,
                      const Eigen::Vector3d& xi0, double x0, const TargetPose& target,
                      const CollisionSet& collision, int max_iter, double tol) {
  const int H = weights.horizon;
  if (H < 1) throw ParamError("solve_mpc: horizon must be >= 1");
  const Eigen::MatrixXd M_rho = steady_state_basis(model);
  const int n_rho = static_cast<int>(M_rho.cols());
  const int nu = 2 * H;
  const int nz = nu + n_rho;
  const Eigen::MatrixXd Mx = M_rho.topRows(3);
  const Eigen::MatrixXd Mu = M_rho.bottomRows(2);

  // Prediction matrices: xi(k) = Phi[k] xi0 + Gam[k] U.
  std::vector<Eigen::Matrix3d> Phi(static_cast<std::size_t>(H) + 1);
  std::vector<Eigen::MatrixXd> Gam(static_cast<std::size_t>(H) + 1);
  Phi[0] = Eigen::Matrix3d::Identity();
  Gam[0] = Eigen::MatrixXd::Zero(3, nu);
  for (int k = 0; k < H; ++k) {
    Phi[static_cast<std::size_t>(k) + 1] = model.A * Phi[static_cast<std::size_t>(k)];
    Gam[static_cast<std::size_t>(k) + 1] = model.A * Gam[static_cast<std::size_t>(k)];
    Gam[static_cast<std::size_t>(k) + 1].block(0, 2 * k, 3, 2) = model.B;
  }

  QpProblem qp;
  qp.H = Eigen::MatrixXd::Zero(nz, nz);
  qp.g = Eigen::VectorXd::Zero(nz);
  double c0 = 0.0;

  const auto accumulate = [&](const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                              const Eigen::MatrixXd& M) {
    qp.H += 2.0 * W.transpose() * M * W;
    qp.g += 2.0 * W.transpose() * M * b;
    c0 += b.dot(M * b);
  };

  Eigen::MatrixXd W(3, nz);
  for (int k = 0; k < H; ++k) {
    W.leftCols(nu) = Gam[static_cast<std::size_t>(k)];
    W.rightCols(n_rho) = -Mx;
    accumulate(W, Phi[static_cast<std::size_t>(k)] * xi0, weights.Q);

    Eigen::MatrixXd WU = Eigen::MatrixXd::Zero(2, nz);
    WU(0, 2 * k) = 1.0;
    WU(1, 2 * k + 1) = 1.0;
    WU.rightCols(n_rho) = -Mu;
    accumulate(WU, Eigen::Vector2d::Zero(), weights.R);
  }
  W.leftCols(nu) = Gam[static_cast<std::size_t>(H)];
  W.rightCols(n_rho) = -Mx;
  accumulate(W, Phi[static_cast<std::size_t>(H)] * xi0, weights.P);

  Eigen::MatrixXd W_off = Eigen::MatrixXd::Zero(3, nz);
  W_off.rightCols(n_rho) = Mx;
  accumulate(W_off, -target.vec(), weights.T_w);

  // Terminal equality xi(H) = xi_ss.
  qp.E = Eigen::MatrixXd::Zero(3, nz);
  qp.E.leftCols(nu) = Gam[static_cast<std::size_t>(H)];
  qp.E.rightCols(n_rho) = -Mx;
  qp.e = -(Phi[static_cast<std::size_t>(H)] * xi0);

  // Inequalities: input box, state box, collision planes on (x(k), y(k)).
  const int n_planes = static_cast<int>(collision.planes.size());
  const int rows = 4 * H + 6 * H + n_planes * H;
  qp.C = Eigen::MatrixXd::Zero(rows, nz);
  qp.d = Eigen::VectorXd::Zero(rows);
  int row = 0;

  const double u_lo[2] = {model.u_bounds.steer.lo, model.u_bounds.accel.lo};
  const double u_hi[2] = {model.u_bounds.steer.hi, model.u_bounds.accel.hi};
  for (int k = 0; k < H; ++k) {
    for (int i = 0; i < 2; ++i) {
      qp.C(row, 2 * k + i) = 1.0;
      qp.d(row++) = u_hi[i];
      qp.C(row, 2 * k + i) = -1.0;
      qp.d(row++) = -u_lo[i];
    }
  }

  const double x_lo[3] = {model.x_bounds.y.lo, model.x_bounds.psi.lo, model.x_bounds.v.lo};
  const double x_hi[3] = {model.x_bounds.y.hi, model.x_bounds.psi.hi, model.x_bounds.v.hi};
  for (int k = 1; k <= H; ++k) {
    const Eigen::Vector3d bias = Phi[static_cast<std::size_t>(k)] * xi0;
    for (int i = 0; i < 3; ++i) {
      qp.C.row(row).head(nu) = Gam[static_cast<std::size_t>(k)].row(i);
      qp.d(row++) = x_hi[i] - bias(i);
      qp.C.row(row).head(nu) = -Gam[static_cast<std::size_t>(k)].row(i);
      qp.d(row++) = bias(i) - x_lo[i];
    }
  }

  // Longitudinal prediction x(k) = x0 + ts * sum_{j<k} v(j): affine in U.
  Eigen::RowVectorXd x_row = Eigen::RowVectorXd::Zero(nu);
  double x_bias = x0;
  const double tighten = 1e-6;  // strict satisfaction margin
  for (int k = 1; k <= H; ++k) {
    x_row += model.ts * Gam[static_cast<std::size_t>(k) - 1].row(2);
    x_bias += model.ts * (Phi[static_cast<std::size_t>(k) - 1] * xi0)(2);
    const Eigen::RowVectorXd y_row = Gam[static_cast<std::size_t>(k)].row(0);
    const double y_bias = (Phi[static_cast<std::size_t>(k)] * xi0)(0);
    for (const auto& plane : collision.planes) {
      const HalfPlane hp = plane.at(k, model.ts);
      qp.C.row(row).head(nu) = hp.a * x_row + hp.b * y_row;
      qp.d(row++) = -hp.c - tighten - hp.a * x_bias - hp.b * y_bias;
    }
  }

  const QpResult sol = solve_qp(qp, max_iter, tol);

  MpcSolution out;
  out.status = sol.status == QpStatus::optimal
                   ? SolveStatus::optimal
                   : (sol.status == QpStatus::infeasible ? SolveStatus::infeasible
                                                         : SolveStatus::max_iter);
  out.inputs.resize(2, H);
  for (int k = 0; k < H; ++k) {
    out.inputs(0, k) = sol.z(2 * k);
    out.inputs(1, k) = sol.z(2 * k + 1);
  }
  out.rho = sol.z.tail(n_rho);
  out.steady_state = Mx * out.rho;
  out.states.resize(3, H + 1);
  out.states.col(0) = xi0;
  out.xs.assign(static_cast<std::size_t>(H) + 1, x0);
  for (int k = 0; k < H; ++k) {
    out.states.col(k + 1) = model.A * out.states.col(k) + model.B * out.inputs.col(k);
    out.xs[static_cast<std::size_t>(k) + 1] =
        out.xs[static_cast<std::size_t>(k)] + model.ts * out.states(2, k);
  }
  out.objective = sol.objective + c0;
  return out;
}

void write_solution_csv(const std::string& path, const MpcSolution& solution) {
  CsvWriter w(path, {"k", "y", "psi", "v", "steer", "accel", "objective", "status"});
  const int H = static_cast<int>(solution.inputs.cols());
  for (int k = 0; k <= H; ++k) {
    w.row({CsvWriter::format(static_cast<long>(k)), CsvWriter::format(solution.states(0, k)),
           CsvWriter::format(solution.states(1, k)), CsvWriter::format(solution.states(2, k)),
           k < H ? CsvWriter::format(solution.inputs(0, k)) : std::string(),
           k < H ? CsvWriter::format(solution.inputs(1, k)) : std::string(),
           CsvWriter::format(solution.objective), to_string(solution.status)});
  }
}

}  // namespace lanekit
