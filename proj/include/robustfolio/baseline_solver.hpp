// SPDX-License-Identifier: MIT
/**
 * @file baseline_solver.hpp
 * @brief Expected-utility maximization over an action box, the marginal
 * utility pricing measure Q_u, and the Davis price (formula and root form).
 */
#pragma once

#include <optional>

#include "robustfolio/measures.hpp"
#include "robustfolio/payoff.hpp"
#include "robustfolio/utility.hpp"

namespace robustfolio {

/// Closed box of admissible strategies; bounds may be infinite.
struct ActionSpace {
  Vec lower;
  Vec upper;

  static ActionSpace whole(int dim);
  static ActionSpace interval(double lo, double hi);

  int dim() const { return static_cast<int>(lower.size()); }
  bool bounded() const;
  Vec project(const Vec& pi) const;
};

struct ProblemSpec {
  DiscreteMeasure model;
  Utility utility;
  ActionSpace action;
  WassersteinOrder order;
  std::optional<Payoff> payoff;

  ProblemSpec(DiscreteMeasure model, Utility utility, ActionSpace action,
              WassersteinOrder order = WassersteinOrder::infinity(),
              std::optional<Payoff> payoff = std::nullopt);

  int dim() const { return model.dim(); }
  const StateSpace& state_space() const { return model.state_space(); }
};

/// Smallest distance from the wealth range {<x, pi> : x in S (or the atom
/// box if S is unbounded), pi in A} to the edge of the utility domain.
/// With an unbounded action box only pi = 0 is checked. Infinite when D = R.
double compatibility_margin(const ProblemSpec& spec);

/// Throws ConfigError on dimension mismatch and AssumptionError on arbitrage
/// or a nonpositive compatibility margin.
void validate(const ProblemSpec& spec);

struct SolverOptions {
  int max_iter = 200;
  double grad_tol = 1e-14;        // relative to sum w |u'| |x|
  double zero_threshold = 1e-10;  // |pi*| at or below this is pi* = 0
};

struct BaselineSolution {
  Vec pi_star;
  double V0 = 0.0;
  Vec foc_residual;  // E[X u'(<X, pi*>)]
  Mat hessian;       // E[X X' u''(<X, pi*>)]
  std::optional<DiscreteMeasure> q_u;
  bool on_boundary = false;   // pi* on the edge of A with the gradient pointing out
  bool pi_star_zero = false;  // |pi*| <= zero_threshold
  int iterations = 0;
};

/// Maximizer of sum_i w_i u(<x_i, pi> + c_i - penalty |pi|) over the box A.
/// Columns of X are atoms; offsets may be empty. Projected damped Newton
/// with a backtracking line search that keeps every wealth inside D, and a
/// bisection fallback on the derivative in d = 1.
struct ConcaveMax {
  Vec pi;
  double value = 0.0;
  Vec gradient;
  Mat hessian;
  bool on_boundary = false;
  int iterations = 0;
};

ConcaveMax maximize_expected_utility(const Mat& X, const Vec& w, const Vec& offsets,
                                     const Utility& u, const ActionSpace& A, double penalty,
                                     const Vec& start, const SolverOptions& opt = {});

BaselineSolution solve_baseline(const ProblemSpec& spec, const SolverOptions& opt = {});

/// P reweighted by u'(<X, pi*>) / E[u'(<X, pi*>)]. Refuses boundary
/// optima except pi* = 0 (where Q_u = P).
DiscreteMeasure q_u_measure(const ProblemSpec& spec, const BaselineSolution& sol);

/// E_{Q_u}[g(X)].
double davis_price(const ProblemSpec& spec, const BaselineSolution& sol, const Payoff& g);

struct RootOptions {
  double h = 1e-5;  // central difference step in epsilon
  double xtol = 1e-13;
};

/// Value of sup_pi E[u(-eps + <X, pi> + eps g(X) / p)].
double davis_epsilon_value(const ProblemSpec& spec, const Payoff& g, double eps, double p,
                           const Vec& start, Vec* argmax = nullptr);

/// Root in p of the central difference of eps -> V(eps, p) at 0, with the
/// strategy re-optimized at each eps. The bracket must not contain 0 and
/// must contain a sign change.
double davis_price_via_root(const ProblemSpec& spec, const Payoff& g, double lo, double hi,
                            const RootOptions& opt = {});

}  // namespace robustfolio
