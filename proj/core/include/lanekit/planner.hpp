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

#ifndef LANEKIT_PLANNER_HPP
#define LANEKIT_PLANNER_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanekit/context.hpp"
#include "lanekit/scene.hpp"

namespace lanekit {

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct StateBounds {
  Bounds y{-1e9, 1e9};
  Bounds psi{-0.2, 0.2};
  Bounds v{0.0, 40.0};
};

struct InputBounds {
  Bounds steer{-0.1, 0.1};  ///< delta_f (rad)
  Bounds accel{-4.0, 3.0};  ///< a_x (m/s^2)
};

/// Linear lateral/heading/speed plant xi = [y, psi, v], u = [delta_f, a_x],
/// forward-Euler discretised about the linearisation speed v0.
struct PlantModel {
  Eigen::Matrix3d A;
  Eigen::Matrix<double, 3, 2> B;
  double ts = 0.1;
  double v0 = 25.0;
  double wheelbase = 2.7;
  StateBounds x_bounds;
  InputBounds u_bounds;
};

/// A = [[1, ts*v0, 0], [0, 1, 0], [0, 0, 1]],
/// B = [[0, 0], [ts*v0/L, 0], [0, ts]]. Throws when the lateral channel is
/// uncontrollable (v0 = 0).
PlantModel build_model(double v0, double wheelbase, double ts, const StateBounds& xb = {},
                       const InputBounds& ub = {});

/// Solution of P = AᵀPA - AᵀPB (R + BᵀPB)⁻¹ BᵀPA + Q by the structured
/// doubling iteration; the returned P satisfies the equation with residual
/// below `residual_tol`.
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           double residual_tol = 1e-8, int max_iter = 100);

/// K = (R + BᵀPB)⁻¹ BᵀPA; the closed loop A - BK has spectral radius < 1.
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

double spectral_radius(const Eigen::MatrixXd& M);

/// Basis M_rho of the steady-state subspace: columns span the null space of
/// [A - I, B] stacked as (xi_ss; u_ss).
Eigen::MatrixXd steady_state_basis(const PlantModel& model);

struct MpcWeights {
  Eigen::Matrix3d Q;
  Eigen::Matrix2d R;
  Eigen::Matrix3d P;    ///< terminal weight, DARE solution for (A, B, Q, R)
  Eigen::Matrix3d T_w;  ///< offset weight, 1000 * P
  int horizon = 30;

  /// Q = diag(1e3, 1e-2, 1e-2), R = diag(1e1, 1e-2), P from the DARE,
  /// T = 1e3 P, H = 30.
  static MpcWeights defaults(const PlantModel& model);
};

struct TargetPose {
  double y_hat = 0.0;
  double psi_hat = 0.0;
  double v_hat = 0.0;

  Eigen::Vector3d vec() const { return {y_hat, psi_hat, v_hat}; }
};

enum class Manoeuvre { lane_keep, lane_change };

struct TargetParams {
  double v_pref = 30.0;     ///< preferred speed when no LV constrains (m/s)
  double t_hw = 2.0;        ///< time headway kept to the LV (s)
  double gap_min = 5.0;     ///< hard clearance behind the LV (m)
  double road_margin = 1.2; ///< centre clearance to the road edges (m)
  double side_margin = 0.3; ///< centre clearance to an occupied adjacent lane (m)
  double sensing_range = 100.0;
};

/// Lane keep: centre of the current lane, zero heading, speed limited to a
/// t_hw headway behind the LV. Lane change: centre of the desired lane with
/// the speed rule applied against that lane's LV. `committed_lane` pins the
/// desired lane during an ongoing manoeuvre.
TargetPose target_generation(Manoeuvre decision, std::span<const AgentState> snapshot,
                             const AgentState& ego, const RoadGeometry& road,
                             const TargetParams& params,
                             std::optional<int> committed_lane = std::nullopt);

/// Half-plane a x + b y + c < 0 over global (x, y) positions.
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double eval(double x, double y) const { return a * x + b * y + c; }
};

/// Half-plane whose offset follows a constant-velocity neighbor over the
/// horizon: c(k) = c + k ts c_rate.
struct MovingHalfPlane {
  HalfPlane base;
  double c_rate = 0.0;
  std::string tag;

  HalfPlane at(int k, double ts) const { return {base.a, base.b, base.c + k * ts * c_rate}; }
};

struct CollisionSet {
  std::vector<MovingHalfPlane> planes;
  bool ego_inside = true;  ///< all planes satisfied at the ego position, k = 0

  /// Planes satisfied at the ego position; used when escalating.
  CollisionSet satisfied_at(double x, double y) const;
};

/// Convex collision-free region: road-edge planes, a rear-boundary plane
/// behind the guarded lane's LV at gap_min + t_hw * ego speed clearance, a
/// reduced-clearance guard behind the departed lane's LV while the ego is
/// still inside it, and side planes against occupied adjacent lanes until
/// the corridor is clear.
CollisionSet build_collision_set(std::span<const AgentState> snapshot, const AgentState& ego,
                                 const RoadGeometry& road, Manoeuvre decision,
                                 const TargetParams& params,
                                 std::optional<int> committed_lane = std::nullopt,
                                 std::optional<int> departed_lane = std::nullopt);

enum class SolveStatus { optimal, infeasible, max_iter };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    default: return "max_iter";
  }
}

struct MpcSolution {
  Eigen::Matrix<double, 2, Eigen::Dynamic> inputs;  ///< 2 x H
  Eigen::VectorXd rho;
  Eigen::Vector3d steady_state = Eigen::Vector3d::Zero();  ///< xi_ss = M_xi rho
  Eigen::Matrix<double, 3, Eigen::Dynamic> states;         ///< 3 x (H+1), by the recursion
  std::vector<double> xs;                                  ///< predicted longitudinal positions
  double objective = 0.0;
  SolveStatus status = SolveStatus::optimal;

  Eigen::Vector2d first_input() const { return inputs.col(0); }
};

/// Tracking MPC with an artificial steady state: minimises the stage costs
/// plus ||xi(H) - xi_ss||_P and ||xi_ss - xi_hat||_T over (U, rho) subject to
/// the dynamics, box bounds, the collision planes applied to the predicted
/// (x, y) positions, and the terminal equality xi(H) = xi_ss.
MpcSolution solve_mpc(const PlantModel& model, const MpcWeights& weights,
                      const Eigen::Vector3d& xi0, double x0, const TargetPose& target,
                      const CollisionSet& collision, int max_iter = 500, double tol = 1e-6);

/// Solution trace as CSV: k, y, psi, v, steer, accel, objective, status.
void write_solution_csv(const std::string& path, const MpcSolution& solution);

}  // namespace lanekit

#endif  // LANEKIT_PLANNER_HPP
