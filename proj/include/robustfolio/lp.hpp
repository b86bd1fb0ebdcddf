// SPDX-License-Identifier: MIT
/**
 * @file lp.hpp
 * @brief Dense two-phase simplex for the small transport and feasibility
 * programs used by the measures module.
 */
#pragma once

#include <Eigen/Dense>

namespace robustfolio {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// Minimizes c'x subject to A x = b, x >= 0. Bland's rule, so it cannot
/// cycle; intended for a few hundred variables at most.
LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace robustfolio
