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

#include "lanekit/qp.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "lanekit/errors.hpp"
#include "lanekit/rng.hpp"
#include "support/oracles.hpp"

namespace lanekit {
namespace {

QpProblem empty_problem(int n) {
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Identity(n, n);
  qp.g = Eigen::VectorXd::Zero(n);
  qp.E = Eigen::MatrixXd::Zero(0, n);
  qp.e = Eigen::VectorXd::Zero(0);
  qp.C = Eigen::MatrixXd::Zero(0, n);
  qp.d = Eigen::VectorXd::Zero(0);
  return qp;
}

TEST(SolveQp, UnconstrainedMinimiser) {
  QpProblem qp = empty_problem(3);
  qp.H << 4, 1, 0, 1, 3, 0, 0, 0, 2;
  qp.g << -1.0, 2.0, 0.5;
  const QpResult r = solve_qp(qp);
  EXPECT_EQ(r.status, QpStatus::optimal);
  const Eigen::Vector3d expect = qp.H.ldlt().solve(-qp.g);
  EXPECT_LT((r.z - expect).norm(), 1e-12);
}

TEST(SolveQp, SingleActiveBound) {
  // min ½(x² + y²) - 4x s.t. x <= 1: optimum (1, 0), multiplier 3.
  QpProblem qp = empty_problem(2);
  qp.g << -4.0, 0.0;
  qp.C = Eigen::MatrixXd::Zero(1, 2);
  qp.C(0, 0) = 1.0;
  qp.d = Eigen::VectorXd::Constant(1, 1.0);
  const QpResult r = solve_qp(qp);
  EXPECT_EQ(r.status, QpStatus::optimal);
  EXPECT_NEAR(r.z(0), 1.0, 1e-12);
  EXPECT_NEAR(r.z(1), 0.0, 1e-12);
  EXPECT_NEAR(r.objective, 0.5 - 4.0, 1e-12);
  ASSERT_EQ(r.active.size(), 1u);
  EXPECT_EQ(r.active[0], 0);
}

TEST(SolveQp, EqualityConstrainedClosedForm) {
  // min ½ zᵀz s.t. x + y = 2: optimum (1, 1).
  QpProblem qp = empty_problem(2);
  qp.E = Eigen::MatrixXd::Ones(1, 2);
  qp.e = Eigen::VectorXd::Constant(1, 2.0);
  const QpResult r = solve_qp(qp);
  EXPECT_EQ(r.status, QpStatus::optimal);
  EXPECT_NEAR(r.z(0), 1.0, 1e-12);
  EXPECT_NEAR(r.z(1), 1.0, 1e-12);
}

TEST(SolveQp, InfeasibleBoundsDetected) {
  // x <= 0 and -x <= -1 cannot hold together.
  QpProblem qp = empty_problem(1);
  qp.C = Eigen::MatrixXd::Zero(2, 1);
  qp.C(0, 0) = 1.0;
  qp.C(1, 0) = -1.0;
  qp.d = Eigen::VectorXd::Zero(2);
  qp.d(1) = -1.0;
  EXPECT_EQ(solve_qp(qp).status, QpStatus::infeasible);
}

TEST(SolveQp, InconsistentEqualitiesDetected) {
  QpProblem qp = empty_problem(2);
  qp.E = Eigen::MatrixXd::Zero(2, 2);
  qp.E << 1.0, 1.0, 1.0, 1.0;
  qp.e = Eigen::VectorXd::Zero(2);
  qp.e << 1.0, 3.0;
  EXPECT_EQ(solve_qp(qp).status, QpStatus::infeasible);
}

TEST(SolveQp, RedundantDuplicateRowsAreHarmless) {
  QpProblem qp = empty_problem(2);
  qp.g << -3.0, -3.0;
  qp.C = Eigen::MatrixXd::Zero(4, 2);
  qp.C << 1, 0, 1, 0, 0, 1, 0, 1;  // each bound twice
  qp.d = Eigen::VectorXd::Ones(4);
  const QpResult r = solve_qp(qp);
  EXPECT_EQ(r.status, QpStatus::optimal);
  EXPECT_NEAR(r.z(0), 1.0, 1e-10);
  EXPECT_NEAR(r.z(1), 1.0, 1e-10);
}

TEST(SolveQp, NonPdHessianThrows) {
  QpProblem qp = empty_problem(2);
  qp.H << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(solve_qp(qp), NumericError);
}

TEST(SolveQp, RandomProblemsMatchEnumerationOracle) {
  Rng rng(97);
  int solved = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 250; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(4));  // 2..5 vars
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) M(i, j) = rng.gaussian();
    }
    QpProblem qp = empty_problem(n);
    qp.H = M.transpose() * M + 0.3 * Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) qp.g(i) = rng.gaussian(0.0, 2.0);

    const int me = static_cast<int>(rng.bounded(2));
    qp.E = Eigen::MatrixXd::Zero(me, n);
    qp.e = Eigen::VectorXd::Zero(me);
    for (int j = 0; j < me; ++j) {
      for (int i = 0; i < n; ++i) qp.E(j, i) = rng.gaussian();
      qp.e(j) = rng.gaussian();
    }

    const int mi = 2 + static_cast<int>(rng.bounded(9));  // 2..10 rows
    qp.C = Eigen::MatrixXd::Zero(mi, n);
    qp.d = Eigen::VectorXd::Zero(mi);
    for (int j = 0; j < mi; ++j) {
      for (int i = 0; i < n; ++i) qp.C(j, i) = rng.gaussian();
      qp.d(j) = rng.gaussian(0.5, 1.0);  // mildly biased toward feasibility
    }

    const QpResult got = solve_qp(qp);
    const auto oracle =
        testing::qp_enumeration_oracle(qp.H, qp.g, qp.E, qp.e, qp.C, qp.d);
    if (!oracle.feasible) {
      EXPECT_EQ(got.status, QpStatus::infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(got.status, QpStatus::optimal) << "trial " << trial;
    EXPECT_NEAR(got.objective, oracle.objective, 1e-7 * (1.0 + std::abs(oracle.objective)))
        << "trial " << trial;
    ++solved;
  }
  // The generator must exercise both outcomes.
  EXPECT_GT(solved, 150);
  EXPECT_GT(infeasible, 5);
}

}  // namespace
}  // namespace lanekit
