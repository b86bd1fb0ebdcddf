// SPDX-License-Identifier: MIT
/**
 * @file sensitivity.hpp
 * @brief First-order sensitivities in the Wasserstein radius delta: value,
 * optimizer, Davis price, the transport direction, the KL comparator and
 * the first-order preference score.
 */
#pragma once

#include <optional>
#include <string>

#include "robustfolio/baseline_solver.hpp"

namespace robustfolio {

struct SensitivityOptions {
  /// Rejects exponential-type utilities with finite p when the adversary
  /// can reach unbounded (or very wide) regions; V'(0) = -inf there.
  bool growth_guard = true;
  double kappa_floor = 0.01;     // capped_exponential with kappa below this counts as exponential
  double diameter_cap = 100.0;   // state-space diameter considered unbounded
};

/// Throws AssumptionError ("degenerate sensitivity") when the guard fires.
void growth_guard(const ProblemSpec& spec, const SensitivityOptions& opt = {});

/// (E|u'(<X, pi*>)|^q)^(1/q).
double marginal_utility_norm(const ProblemSpec& spec, const Vec& pi);

/// V'(0) = -||u'(<X, pi*>)||_q |pi*|; zero when pi* = 0.
double value_sensitivity(const ProblemSpec& spec, const BaselineSolution& sol,
                         const SensitivityOptions& opt = {});

struct OptimizerSensitivity {
  Vec pi_prime0;
  double kappa_u = 0.0;
};

/// pi*'(0) = H^{-1} (pi*/|pi*|) kappa_u with
/// kappa_u = ||u'||_q^{1-q} E[(<X,pi*> u'' + u') |u'|^{q-1}].
OptimizerSensitivity optimizer_sensitivity(const ProblemSpec& spec, const BaselineSolution& sol,
                                           const SensitivityOptions& opt = {});

/// T(x) = (pi*/|pi*|) |u'(<x,pi*>)|^{q-1} (E|u'|^q)^{1/q - 1}.
Vec transport_direction(const ProblemSpec& spec, const BaselineSolution& sol, const Vec& x);

/// p_d'(0). For pi* = 0: -(E|grad g|^q)^{1/q}. Otherwise
/// E_{Q_u}[R_u (<T, pi*> - <X, pi*'>) (g - p_d) - <grad g, T>].
double davis_sensitivity(const ProblemSpec& spec, const BaselineSolution& sol, const Payoff& g,
                         const SensitivityOptions& opt = {});

/// -sqrt(2 Var(u(<X, pi*>))); refuses discretizations of unbounded models.
double kl_value_sensitivity(const ProblemSpec& spec, const BaselineSolution& sol);

struct PreferenceResult {
  double score_first = 0.0;
  double score_second = 0.0;
  /// +1 if the first model is preferred, -1 if the second, 0 on a tie.
  int ordering = 0;
};

/// Scores E[u(<X,pi>)] - delta |pi| ||u'(<X,pi>)||_q under each model.
PreferenceResult preference_compare(const DiscreteMeasure& P, const DiscreteMeasure& P_check,
                                    const Vec& pi, const Utility& u, const WassersteinOrder& order,
                                    double delta);

enum class Branch { interior, pi_star_zero };

struct SensitivityReport {
  double q = 1.0;
  Vec pi_star;
  double V0 = 0.0;
  double V_prime0 = 0.0;
  Vec pi_prime0;           // empty on the pi* = 0 branch
  double kappa_u = 0.0;    // nan on the pi* = 0 branch
  std::optional<double> davis_price;
  std::optional<double> davis_prime0;
  std::optional<double> kl_V_prime0;
  Branch branch = Branch::interior;
  /// Which formula produced each entry, e.g. "V_prime0=norm_formula".
  std::string provenance;
};

/// Everything above for one solved problem; the Davis entries need a
/// payoff in the spec, the KL entry a finitely supported model.
SensitivityReport sensitivity_report(const ProblemSpec& spec, const BaselineSolution& sol,
                                     const SensitivityOptions& opt = {});

}  // namespace robustfolio
