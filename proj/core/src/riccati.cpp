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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lanekit/errors.hpp"
#include "lanekit/planner.hpp"

namespace lanekit {

namespace {

Eigen::MatrixXd dare_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                              const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                              const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd BtPB = B.transpose() * P * B;
  const Eigen::MatrixXd K = (R + BtPB).ldlt().solve(B.transpose() * P * A);
  return A.transpose() * P * A - A.transpose() * P * B * K + Q - P;
}

}  // namespace

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           double residual_tol, int max_iter) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols()) {
    throw ShapeError("solve_dare: inconsistent matrix dimensions");
  }
  Eigen::LLT<Eigen::MatrixXd> r_llt(R);
  if (r_llt.info() != Eigen::Success) {
    throw ParamError("solve_dare: R must be positive definite");
  }

  // Structured doubling iteration: quadratically convergent fixed point of
  // the symplectic pencil.
  Eigen::MatrixXd A_k = A;
  Eigen::MatrixXd G_k = B * r_llt.solve(B.transpose());
  Eigen::MatrixXd H_prev;
  Eigen::MatrixXd H_k = Q;

  for (int it = 0; it < max_iter; ++it) {
    H_prev = H_k;
    const Eigen::MatrixXd W = Eigen::MatrixXd::Identity(n, n) + G_k * H_k;
    Eigen::PartialPivLU<Eigen::MatrixXd> w_lu(W);
    const Eigen::MatrixXd V1 = w_lu.solve(A_k);
    const Eigen::MatrixXd V2 = w_lu.solve(G_k.transpose()).transpose();
    G_k += A_k * V2 * A_k.transpose();
    H_k = H_prev + V1.transpose() * H_prev * A_k;
    A_k *= V1;

    if ((H_k - H_prev).norm() <= 1e-14 * std::max(1.0, H_k.norm())) {
      const Eigen::MatrixXd res = dare_residual(A, B, Q, R, H_k);
      if (res.cwiseAbs().maxCoeff() > residual_tol) {
        throw NumericError("solve_dare: converged iterate violates the residual tolerance");
      }
      return 0.5 * (H_k + H_k.transpose());  // symmetrise roundoff
    }
  }
  throw NumericError("solve_dare: doubling iteration did not converge");
}

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd P = solve_dare(A, B, Q, R);
  const Eigen::MatrixXd BtPB = B.transpose() * P * B;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(R + BtPB);
  if (ldlt.info() != Eigen::Success) {
    throw NumericError("lqr_gain: R + BtPB is singular");
  }
  return ldlt.solve(B.transpose() * P * A);
}

double spectral_radius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace lanekit
