// SPDX-License-Identifier: MIT
/**
 * @file robust_solver.hpp
 * @brief Worst case over Wasserstein balls: exact reduction for p = inf,
 * a Lagrangian brute-force oracle for finite p in d = 1, and the robust
 * Davis price under the worst-case measure.
 */
#pragma once

#include <optional>
#include <vector>

#include "robustfolio/baseline_solver.hpp"
#include "robustfolio/sensitivity.hpp"

namespace robustfolio {

enum class RobustMethod { inf_exact, finite_p_oracle };

struct RobustSolution {
  double delta = 0.0;
  double V_delta = 0.0;
  Vec pi_delta;
  DiscreteMeasure adversary;
  double transport_cost = 0.0;  // W_p(P, adversary)
  std::optional<double> robust_davis;
  RobustMethod method = RobustMethod::inf_exact;
  bool pi_delta_zero = false;
  /// Finite p only: primal value minus the best Lagrangian dual value seen.
  double certificate_gap = 0.0;
};

struct OracleOptions {
  int fragments = 2;          // K in [2, 4]
  int grid_points = 256;      // uniform candidates per atom
  int lambda_iterations = 200;
  double outer_tol = 1e-8;    // golden-section tolerance in pi
  bool polish = true;         // bisection on the Danskin derivative after golden section
  SensitivityOptions guard;
};

/// inf over the W_inf ball reduces to shifting every atom by delta against
/// the position (clamped to S in d = 1). pi_delta maximizes the reduced
/// concave objective; adversary = x -> x - delta pi/|pi|.
RobustSolution robust_solve_inf(const ProblemSpec& spec, double delta);

struct InnerResult {
  double value = 0.0;
  DiscreteMeasure adversary;
  double dual_bound = 0.0;
  double coupling_cost = 0.0;  // (sum of w v |y - x|^p)^(1/p) of the constructed coupling
};

/// Finite-p worst case of E[u(<X, pi>)] over the ball, d = 1, at most 16
/// atoms. Each atom is split into fragments moved against sign(pi); the
/// budget constraint is handled by bisection on its Lagrange multiplier,
/// with budget-concentration candidates added.
InnerResult adversary_inner_inf(const DiscreteMeasure& P, const Utility& u, const Vec& pi,
                                double delta, const WassersteinOrder& order,
                                const OracleOptions& opt = {});

/// Same oracle for inf over the ball of E[g(X)] (moves in both directions).
InnerResult payoff_inner_inf(const DiscreteMeasure& P, const Payoff& g, double delta,
                             const WassersteinOrder& order, const OracleOptions& opt = {});

/// Golden section over pi of the inner oracle value.
RobustSolution robust_solve_p(const ProblemSpec& spec, double delta, const OracleOptions& opt = {});

/// Dispatches on spec.order.
RobustSolution robust_solve(const ProblemSpec& spec, double delta, const OracleOptions& opt = {});

struct RobustGrid {
  std::vector<RobustSolution> solutions;
  /// V(delta) nonincreasing along the grid (sorted by delta).
  bool monotone = true;
};

RobustGrid robust_solve_grid(const ProblemSpec& spec, const std::vector<double>& deltas,
                             const OracleOptions& opt = {});

/// E_{P*}[u'(<X,pi_delta>) g] / E_{P*}[u'(<X,pi_delta>)]; when pi_delta = 0
/// the infimum of E[g] over the ball.
double robust_davis_price(const ProblemSpec& spec, const RobustSolution& sol, const Payoff& g,
                          const OracleOptions& opt = {});
double robust_davis_price(const ProblemSpec& spec, const Payoff& g, double delta,
                          const OracleOptions& opt = {});

/// First-order approximation: P pushed by x -> x - delta T(x), reweighted
/// by u'(<x - delta T(x), pi* + delta pi*'(0)>).
double robust_davis_first_order(const ProblemSpec& spec, const Payoff& g, double delta);

/// |E[X]| under P* reweighted by u'(<X, pi_delta>).
double martingale_check_robust(const ProblemSpec& spec, const RobustSolution& sol);

}  // namespace robustfolio
