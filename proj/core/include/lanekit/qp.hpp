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

#ifndef LANEKIT_QP_HPP
#define LANEKIT_QP_HPP

#include <Eigen/Dense>
#include <vector>

namespace lanekit {

/// min ½ zᵀHz + gᵀz  s.t.  E z = e,  C z <= d.  H must be positive definite.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd E;
  Eigen::VectorXd e;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;

  int vars() const { return static_cast<int>(H.rows()); }
};

enum class QpStatus { optimal, infeasible, max_iter };

struct QpResult {
  Eigen::VectorXd z;
  QpStatus status = QpStatus::optimal;
  double objective = 0.0;
  int iterations = 0;
  std::vector<int> active;  ///< inequality rows active at the solution
};

/// Dense dual active-set solver (Goldfarb-Idnani scheme). Starts from the
/// unconstrained minimiser and adds violated constraints one at a time, so
/// no feasible initial point is needed and primal infeasibility surfaces as
/// an unbounded dual step. Exact up to linear-solve precision.
QpResult solve_qp(const QpProblem& qp, int max_iter = 500, double tol = 1e-6);

}  // namespace lanekit

#endif  // LANEKIT_QP_HPP
