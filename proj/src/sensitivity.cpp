// SPDX-License-Identifier: MIT
#include "robustfolio/sensitivity.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "robustfolio/errors.hpp"

namespace robustfolio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_usable(const BaselineSolution& sol) {
  if (sol.on_boundary && !sol.pi_star_zero) {
    throw AssumptionError("sensitivity: optimum on the boundary of the action space");
  }
}

double abs_pow(double v, double q) {
  return q == 1.0 ? std::abs(v) : std::pow(std::abs(v), q);
}

}  // namespace

void growth_guard(const ProblemSpec& spec, const SensitivityOptions& opt) {
  if (!opt.growth_guard || spec.order.is_inf()) return;
  const Utility& u = spec.utility;
  const bool exp_like = u.kind() == Utility::Kind::exponential ||
                        (u.kind() == Utility::Kind::capped_exponential && u.kappa() < opt.kappa_floor);
  if (!exp_like) return;
  const bool wide = spec.model.unbounded_support_model() ||
                    !(spec.state_space().diameter() <= opt.diameter_cap);
  if (wide) {
    throw AssumptionError(
        "degenerate sensitivity: exponential-type utility with finite p on an unbounded "
        "state space has V'(0) = -inf (Wasserstein-p balls do not control the tails)");
  }
}

double marginal_utility_norm(const ProblemSpec& spec, const Vec& pi) {
  const double q = spec.order.q;
  double s = 0.0;
  for (int i = 0; i < spec.model.size(); ++i) {
    s += spec.model.weight(i) * abs_pow(spec.utility.d1(spec.model.point(i).dot(pi)), q);
  }
  return q == 1.0 ? s : std::pow(s, 1.0 / q);
}

double value_sensitivity(const ProblemSpec& spec, const BaselineSolution& sol,
                         const SensitivityOptions& opt) {
  require_usable(sol);
  if (sol.pi_star_zero) return 0.0;
  growth_guard(spec, opt);
  return -marginal_utility_norm(spec, sol.pi_star) * sol.pi_star.norm();
}

OptimizerSensitivity optimizer_sensitivity(const ProblemSpec& spec, const BaselineSolution& sol,
                                           const SensitivityOptions& opt) {
  require_usable(sol);
  if (sol.pi_star_zero) {
    throw AssumptionError("optimizer_sensitivity: requires pi* != 0");
  }
  growth_guard(spec, opt);
  const double q = spec.order.q;
  const DiscreteMeasure& P = spec.model;
  double e = 0.0;
  for (int i = 0; i < P.size(); ++i) {
    const double w = P.point(i).dot(sol.pi_star);
    const double du = spec.utility.d1(w);
    e += P.weight(i) * (w * spec.utility.d2(w) + du) * abs_pow(du, q - 1.0);
  }
  const double norm = marginal_utility_norm(spec, sol.pi_star);
  OptimizerSensitivity out;
  out.kappa_u = std::pow(norm, 1.0 - q) * e;
  Eigen::LLT<Mat> llt(-sol.hessian);
  if (llt.info() != Eigen::Success) {
    throw AssumptionError("optimizer_sensitivity: Hessian is not negative definite");
  }
  const Vec dir = sol.pi_star / sol.pi_star.norm();
  out.pi_prime0 = -llt.solve(dir * out.kappa_u);
  return out;
}

Vec transport_direction(const ProblemSpec& spec, const BaselineSolution& sol, const Vec& x) {
  require_usable(sol);
  if (sol.pi_star_zero) throw AssumptionError("transport_direction: requires pi* != 0");
  const double q = spec.order.q;
  const Vec dir = sol.pi_star / sol.pi_star.norm();
  if (q == 1.0) return dir;
  double s = 0.0;
  for (int i = 0; i < spec.model.size(); ++i) {
    s += spec.model.weight(i) * abs_pow(spec.utility.d1(spec.model.point(i).dot(sol.pi_star)), q);
  }
  const double du = spec.utility.d1(x.dot(sol.pi_star));
  return dir * (abs_pow(du, q - 1.0) * std::pow(s, 1.0 / q - 1.0));
}

double davis_sensitivity(const ProblemSpec& spec, const BaselineSolution& sol, const Payoff& g,
                         const SensitivityOptions& opt) {
  require_usable(sol);
  const double q = spec.order.q;
  const DiscreteMeasure& P = spec.model;
  const Payoff gp = g.prepared_for(P);
  if (sol.pi_star_zero) {
    double s = 0.0;
    for (int i = 0; i < P.size(); ++i) s += P.weight(i) * abs_pow(gp.gradient(P.point(i)).norm(), q);
    return -(q == 1.0 ? s : std::pow(s, 1.0 / q));
  }
  const OptimizerSensitivity os = optimizer_sensitivity(spec, sol, opt);
  const DiscreteMeasure Q = sol.q_u ? *sol.q_u : q_u_measure(spec, sol);
  const double price = davis_price(spec, sol, g);
  double s = 0.0;
  for (int i = 0; i < Q.size(); ++i) {
    const Vec x = Q.point(i);
    const double w = x.dot(sol.pi_star);
    const double R = -spec.utility.d2(w) / spec.utility.d1(w);
    const Vec T = transport_direction(spec, sol, x);
    s += Q.weight(i) * (R * (T.dot(sol.pi_star) - x.dot(os.pi_prime0)) * (gp.value(x) - price) -
                        gp.gradient(x).dot(T));
  }
  return s;
}

double kl_value_sensitivity(const ProblemSpec& spec, const BaselineSolution& sol) {
  if (spec.model.unbounded_support_model()) {
    throw AssumptionError(
        "kl_value_sensitivity: refused for discretized unbounded models (the KL problem is "
        "degenerate there)");
  }
  const DiscreteMeasure& P = spec.model;
  double m = 0.0;
  for (int i = 0; i < P.size(); ++i) m += P.weight(i) * spec.utility.value(P.point(i).dot(sol.pi_star));
  double var = 0.0;
  for (int i = 0; i < P.size(); ++i) {
    const double d = spec.utility.value(P.point(i).dot(sol.pi_star)) - m;
    var += P.weight(i) * d * d;
  }
  if (!std::isfinite(var)) throw NumericalError("kl_value_sensitivity: non-finite variance");
  return -std::sqrt(2.0 * var);
}

PreferenceResult preference_compare(const DiscreteMeasure& P, const DiscreteMeasure& P_check,
                                    const Vec& pi, const Utility& u, const WassersteinOrder& order,
                                    double delta) {
  if (!(delta >= 0.0)) throw ConfigError("preference_compare: need delta >= 0");
  auto score = [&](const DiscreteMeasure& M) {
    double eu = 0.0, nq = 0.0;
    for (int i = 0; i < M.size(); ++i) {
      const double w = M.point(i).dot(pi);
      if (!u.in_domain(w)) throw AssumptionError("preference_compare: wealth outside the domain");
      eu += M.weight(i) * u.value(w);
      nq += M.weight(i) * abs_pow(u.d1(w), order.q);
    }
    if (order.q != 1.0) nq = std::pow(nq, 1.0 / order.q);
    return eu - delta * pi.norm() * nq;
  };
  PreferenceResult r;
  r.score_first = score(P);
  r.score_second = score(P_check);
  const double tol = 1e-14 * (1.0 + std::abs(r.score_first) + std::abs(r.score_second));
  if (r.score_first > r.score_second + tol) {
    r.ordering = 1;
  } else if (r.score_second > r.score_first + tol) {
    r.ordering = -1;
  }
  return r;
}

SensitivityReport sensitivity_report(const ProblemSpec& spec, const BaselineSolution& sol,
                                     const SensitivityOptions& opt) {
  SensitivityReport rep;
  rep.q = spec.order.q;
  rep.pi_star = sol.pi_star;
  rep.V0 = sol.V0;
  rep.V_prime0 = value_sensitivity(spec, sol, opt);
  if (sol.pi_star_zero) {
    rep.branch = Branch::pi_star_zero;
    rep.kappa_u = kNaN;
    rep.provenance = "V_prime0=zero_at_pi_star_zero";
  } else {
    rep.branch = Branch::interior;
    const OptimizerSensitivity os = optimizer_sensitivity(spec, sol, opt);
    rep.pi_prime0 = os.pi_prime0;
    rep.kappa_u = os.kappa_u;
    rep.provenance = "V_prime0=norm_formula;pi_prime0=hessian_kappa";
  }
  if (spec.payoff) {
    rep.davis_price = davis_price(spec, sol, *spec.payoff);
    rep.davis_prime0 = davis_sensitivity(spec, sol, *spec.payoff, opt);
    rep.provenance += sol.pi_star_zero ? ";davis_prime0=gradient_norm_branch"
                                       : ";davis_prime0=transport_branch";
  }
  if (!spec.model.unbounded_support_model()) {
    rep.kl_V_prime0 = kl_value_sensitivity(spec, sol);
    rep.provenance += ";kl=variance_formula";
  }
  return rep;
}

}  // namespace robustfolio
