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
#include <limits>

#include "lanekit/errors.hpp"

namespace lanekit {

namespace {

struct Member {
  Eigen::VectorXd row;  ///< oriented so the add step decreased row.z
  double dual = 0.0;
  bool is_eq = false;
  int idx = -1;  ///< inequality row index, -1 for equalities
};

class DualActiveSet {
 public:
  DualActiveSet(const QpProblem& qp, int max_iter, double tol)
      : qp_(qp), max_iter_(max_iter), tol_(tol), hinv_(qp.H.ldlt()) {
    if (hinv_.info() != Eigen::Success || (hinv_.vectorD().array() <= 0.0).any()) {
      throw NumericError("qp: Hessian is not positive definite");
    }
    z_ = hinv_.solve(-qp.g);
  }

  QpResult run() {
    // Equalities first; they are permanent members with free duals.
    for (int j = 0; j < qp_.E.rows(); ++j) {
      const double viol = qp_.E.row(j).dot(z_) - qp_.e(j);
      Eigen::VectorXd row = qp_.E.row(j).transpose();
      double s = viol;
      if (s < 0.0) {
        row = -row;
        s = -s;
      }
      if (!add_constraint(std::move(row), s, true, -1)) {
        return finish(QpStatus::infeasible);
      }
      if (iterations_ > max_iter_) return finish(QpStatus::max_iter);
    }

    while (true) {
      // Most violated inequality.
      int p = -1;
      double worst = tol_;
      for (int i = 0; i < qp_.C.rows(); ++i) {
        if (is_member(i)) continue;
        const double s = qp_.C.row(i).dot(z_) - qp_.d(i);
        if (s > worst) {
          worst = s;
          p = i;
        }
      }
      if (p < 0) return finish(QpStatus::optimal);
      if (++iterations_ > max_iter_) return finish(QpStatus::max_iter);
      if (!add_constraint(qp_.C.row(p).transpose(), worst, false, p)) {
        return finish(QpStatus::infeasible);
      }
    }
  }

 private:
  bool is_member(int ineq_idx) const {
    for (const auto& m : members_) {
      if (!m.is_eq && m.idx == ineq_idx) return true;
    }
    return false;
  }

  /// Drives constraint `row.z` down by `s` so it becomes tight, adjusting
  /// member duals and dropping members whose dual would go negative.
  /// Returns false when the constraint set is inconsistent.
  bool add_constraint(Eigen::VectorXd row, double s, bool is_eq, int idx) {
    double accumulated_dual = 0.0;
    const int inner_cap = 4 * (qp_.vars() + static_cast<int>(qp_.C.rows())) + 16;
    for (int inner = 0; inner < inner_cap; ++inner) {
      const Eigen::VectorXd hinv_n = hinv_.solve(row);
      const double denom0 = row.dot(hinv_n);
      Eigen::VectorXd r;
      Eigen::VectorXd dz;
      double denom = denom0;
      if (!members_.empty()) {
        const int q = static_cast<int>(members_.size());
        Eigen::MatrixXd N(q, qp_.vars());
        for (int j = 0; j < q; ++j) N.row(j) = members_[static_cast<std::size_t>(j)].row;
        const Eigen::MatrixXd NHiNt = N * hinv_.solve(N.transpose());
        const Eigen::VectorXd rhs = N * hinv_n;
        r = NHiNt.ldlt().solve(rhs);
        dz = hinv_.solve(row - N.transpose() * r);
        denom = row.dot(dz);
      } else {
        r.resize(0);
        dz = hinv_n;
      }

      const bool dependent = denom <= 1e-12 * std::max(1.0, denom0);
      if (dependent) {
        if (denom0 <= 1e-14) {
          // Degenerate all-zero row.
          return s <= tol_;
        }
        // Dual-only step: some inequality member must yield.
        int drop = -1;
        double t1 = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < members_.size(); ++j) {
          if (members_[j].is_eq || r(static_cast<Eigen::Index>(j)) <= 1e-12) continue;
          const double cand = members_[j].dual / r(static_cast<Eigen::Index>(j));
          if (cand < t1) {
            t1 = cand;
            drop = static_cast<int>(j);
          }
        }
        if (drop < 0) return false;  // Farkas: constraint unsatisfiable
        apply_dual_step(r, t1);
        accumulated_dual += t1;
        members_.erase(members_.begin() + drop);
        continue;
      }

      const double t2 = s / denom;
      int drop = -1;
      double t1 = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < members_.size(); ++j) {
        if (members_[j].is_eq || r(static_cast<Eigen::Index>(j)) <= 1e-12) continue;
        const double cand = members_[j].dual / r(static_cast<Eigen::Index>(j));
        if (cand < t1) {
          t1 = cand;
          drop = static_cast<int>(j);
        }
      }
      const bool full_step = t2 <= t1;
      const double t = full_step ? t2 : t1;

      z_ -= t * dz;
      if (r.size() > 0) apply_dual_step(r, t);
      accumulated_dual += t;
      s -= t * denom;

      if (full_step) {
        members_.push_back({std::move(row), accumulated_dual, is_eq, idx});
        return true;
      }
      members_.erase(members_.begin() + drop);
    }
    throw NumericError("qp: active-set inner loop failed to converge");
  }

  void apply_dual_step(const Eigen::VectorXd& r, double t) {
    for (std::size_t j = 0; j < members_.size(); ++j) {
      members_[j].dual -= t * r(static_cast<Eigen::Index>(j));
    }
  }

  QpResult finish(QpStatus status) {
    QpResult res;
    res.z = z_;
    res.status = status;
    res.objective = 0.5 * z_.dot(qp_.H * z_) + qp_.g.dot(z_);
    res.iterations = iterations_;
    for (const auto& m : members_) {
      if (!m.is_eq) res.active.push_back(m.idx);
    }
    return res;
  }

  const QpProblem& qp_;
  int max_iter_;
  double tol_;
  Eigen::LDLT<Eigen::MatrixXd> hinv_;
  Eigen::VectorXd z_;
  std::vector<Member> members_;
  int iterations_ = 0;
};

}  // namespace

QpResult solve_qp(const QpProblem& qp, int max_iter, double tol) {
  if (qp.H.rows() != qp.H.cols() || qp.g.size() != qp.H.rows()) {
    throw ShapeError("qp: Hessian/gradient dimensions disagree");
  }
  if (qp.E.rows() != qp.e.size() || (qp.E.rows() > 0 && qp.E.cols() != qp.H.rows())) {
    throw ShapeError("qp: equality block dimensions disagree");
  }
  if (qp.C.rows() != qp.d.size() || (qp.C.rows() > 0 && qp.C.cols() != qp.H.rows())) {
    throw ShapeError("qp: inequality block dimensions disagree");
  }
  DualActiveSet solver(qp, max_iter, tol);
  return solver.run();
}

}  // namespace lanekit
