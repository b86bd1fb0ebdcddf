// SPDX-License-Identifier: MIT
#include "robustfolio/lp.hpp"

#include <cmath>
#include <vector>

namespace robustfolio {

namespace {

constexpr double kPivotTol = 1e-11;

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
      : m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())),
        t_(Eigen::MatrixXd::Zero(m_ + 1, n_ + m_ + 1)), basis_(m_) {
    for (int i = 0; i < m_; ++i) {
      const double s = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = s * A.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = s * b(i);
      basis_[i] = n_ + i;
    }
  }

  int rhs() const { return n_ + m_; }

  void set_objective(const Eigen::VectorXd& cost) {
    // cost has n_ + m_ entries; the objective row stores reduced costs.
    t_.row(m_).setZero();
    t_.row(m_).head(n_ + m_) = cost.transpose();
    for (int i = 0; i < m_; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  /// Runs simplex iterations over columns [0, ncols). Returns false if
  /// unbounded.
  bool optimize(int ncols) {
    for (int iter = 0; iter < 50000; ++iter) {
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (t_(m_, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (t_(i, enter) > kPivotTol) {
          const double r = t_(i, rhs()) / t_(i, enter);
          if (leave < 0 || r < best - 1e-15 ||
              (std::abs(r - best) <= 1e-15 && basis_[i] < basis_[leave])) {
            leave = i;
            best = r;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i <= m_; ++i) {
      if (i != row && t_(i, col) != 0.0) t_.row(i) -= t_(i, col) * t_.row(row);
    }
    basis_[row] = col;
  }

  /// Pivots artificial variables out of the basis where possible.
  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (int j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > kPivotTol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective_value() const { return -t_(m_, rhs()); }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x(basis_[i]) = t_(i, rhs());
    }
    return x;
  }

 private:
  int m_, n_;
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Tableau tab(A, b);

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.set_objective(phase1);
  tab.optimize(n + m);
  LpResult res;
  const double scale = 1.0 + b.cwiseAbs().sum();
  if (tab.objective_value() > 1e-9 * scale) {
    res.status = LpResult::Status::infeasible;
    return res;
  }
  tab.drive_out_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = c;
  tab.set_objective(phase2);
  if (!tab.optimize(n)) {
    res.status = LpResult::Status::unbounded;
    return res;
  }
  res.status = LpResult::Status::optimal;
  res.x = tab.solution();
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace robustfolio
