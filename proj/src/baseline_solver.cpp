// SPDX-License-Identifier: MIT
#include "robustfolio/baseline_solver.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "robustfolio/errors.hpp"
#include "robustfolio/optimize.hpp"

namespace robustfolio {

// --------------------------------------------------------------- ActionSpace

ActionSpace ActionSpace::whole(int dim) {
  return {Vec::Constant(dim, -kInf), Vec::Constant(dim, kInf)};
}

ActionSpace ActionSpace::interval(double lo, double hi) {
  if (!(lo <= hi)) throw ConfigError("action space: need lower <= upper");
  return {Vec::Constant(1, lo), Vec::Constant(1, hi)};
}

bool ActionSpace::bounded() const {
  return lower.allFinite() && upper.allFinite();
}

Vec ActionSpace::project(const Vec& pi) const {
  return pi.cwiseMax(lower).cwiseMin(upper);
}

ProblemSpec::ProblemSpec(DiscreteMeasure model_, Utility utility_, ActionSpace action_,
                         WassersteinOrder order_, std::optional<Payoff> payoff_)
    : model(std::move(model_)), utility(utility_), action(std::move(action_)), order(order_),
      payoff(std::move(payoff_)) {}

// ---------------------------------------------------------------- validation

double compatibility_margin(const ProblemSpec& spec) {
  const double L = spec.utility.domain_lower();
  if (!std::isfinite(L)) return kInf;
  if (!spec.action.bounded()) return -L;
  const int d = spec.dim();
  Vec xlo(d), xhi(d);
  const StateSpace& S = spec.state_space();
  for (int j = 0; j < d; ++j) {
    if (std::isfinite(S.lower()(j)) && std::isfinite(S.upper()(j))) {
      xlo(j) = S.lower()(j);
      xhi(j) = S.upper()(j);
    } else {
      xlo(j) = spec.model.points().row(j).minCoeff();
      xhi(j) = spec.model.points().row(j).maxCoeff();
    }
  }
  double wmin = 0.0;
  for (int j = 0; j < d; ++j) {
    const double a = spec.action.lower(j), b = spec.action.upper(j);
    wmin += std::min({xlo(j) * a, xlo(j) * b, xhi(j) * a, xhi(j) * b});
  }
  return wmin - L;
}

void validate(const ProblemSpec& spec) {
  if (spec.action.dim() != spec.dim()) {
    throw ConfigError("problem: action space dimension differs from the model dimension");
  }
  for (int j = 0; j < spec.dim(); ++j) {
    if (!(spec.action.lower(j) <= 0.0 && spec.action.upper(j) >= 0.0)) {
      throw ConfigError("problem: the action space must contain pi = 0");
    }
  }
  if (spec.payoff && spec.payoff->asset() >= spec.dim()) {
    throw ConfigError("problem: payoff asset index exceeds the model dimension");
  }
  if (!no_arbitrage_check(spec.model)) {
    throw AssumptionError("problem: the baseline model admits arbitrage");
  }
  if (!(compatibility_margin(spec) > 0.0)) {
    throw AssumptionError(
        "problem: wealth can reach the edge of the utility domain (no compatibility margin)");
  }
}

// -------------------------------------------------------------------- engine

namespace {

struct Eval {
  double f = -kInf;
  Vec g;
  Mat H;
  double scale = 1.0;
};

class Objective {
 public:
  Objective(const Mat& X, const Vec& w, const Vec& c, const Utility& u, double penalty)
      : X_(X), w_(w), c_(c), u_(u), penalty_(penalty) {}

  int dim() const { return static_cast<int>(X_.rows()); }

  double wealth(int i, const Vec& pi, double pnorm) const {
    double v = X_.col(i).dot(pi) - penalty_ * pnorm;
    if (c_.size() > 0) v += c_(i);
    return v;
  }

  double value(const Vec& pi) const {
    const double pn = pi.norm();
    double f = 0.0;
    for (int i = 0; i < X_.cols(); ++i) {
      if (w_(i) == 0.0) continue;
      const double y = wealth(i, pi, pn);
      if (!u_.in_domain(y)) return -kInf;
      f += w_(i) * u_.value(y);
    }
    return std::isnan(f) ? -kInf : f;
  }

  Eval eval(const Vec& pi) const {
    const int d = dim();
    Eval e;
    e.g = Vec::Zero(d);
    e.H = Mat::Zero(d, d);
    const double pn = pi.norm();
    Vec dir = Vec::Zero(d);
    if (penalty_ > 0.0 && pn > 0.0) dir = pi / pn;
    double f = 0.0, scale = 0.0, sum_du = 0.0;
    for (int i = 0; i < X_.cols(); ++i) {
      if (w_(i) == 0.0) continue;
      const double y = wealth(i, pi, pn);
      if (!u_.in_domain(y)) return Eval{};
      const double du = u_.d1(y), d2 = u_.d2(y);
      const Vec z = X_.col(i) - penalty_ * dir;
      f += w_(i) * u_.value(y);
      e.g += w_(i) * du * z;
      e.H += w_(i) * d2 * z * z.transpose();
      scale += w_(i) * du * X_.col(i).norm();
      sum_du += w_(i) * du;
    }
    if (penalty_ > 0.0 && pn > 0.0) {
      e.H -= penalty_ * sum_du / pn * (Mat::Identity(d, d) - dir * dir.transpose());
    }
    e.f = std::isnan(f) ? -kInf : f;
    e.scale = std::max(scale, 1e-300);
    return e;
  }

 private:
  const Mat& X_;
  const Vec& w_;
  const Vec& c_;
  const Utility& u_;
  double penalty_;
};

bool at_lower(const ActionSpace& A, const Vec& pi, int j) {
  return std::isfinite(A.lower(j)) && pi(j) <= A.lower(j);
}
bool at_upper(const ActionSpace& A, const Vec& pi, int j) {
  return std::isfinite(A.upper(j)) && pi(j) >= A.upper(j);
}

// Interval of scalar strategies keeping every wealth inside D (d = 1,
// no penalty), intersected with A.
std::pair<double, double> feasible_interval_1d(const Mat& X, const Vec& w, const Vec& c,
                                               const Utility& u, const ActionSpace& A) {
  double lo = A.lower(0), hi = A.upper(0);
  const double L = u.domain_lower();
  if (!std::isfinite(L)) return {lo, hi};
  for (int i = 0; i < X.cols(); ++i) {
    if (w(i) == 0.0) continue;
    const double x = X(0, i);
    const double ci = c.size() > 0 ? c(i) : 0.0;
    if (x > 0.0) {
      lo = std::max(lo, (L - ci) / x);
    } else if (x < 0.0) {
      hi = std::min(hi, (L - ci) / x);
    }
  }
  return {lo, hi};
}

}  // namespace

ConcaveMax maximize_expected_utility(const Mat& X, const Vec& w, const Vec& offsets,
                                     const Utility& u, const ActionSpace& A, double penalty,
                                     const Vec& start, const SolverOptions& opt) {
  const Objective obj(X, w, offsets, u, penalty);
  const int d = obj.dim();
  if (A.dim() != d || start.size() != d) throw ConfigError("solver: dimension mismatch");

  Vec pi = A.project(start);
  Eval ev = obj.eval(pi);
  if (!std::isfinite(ev.f)) {
    pi = A.project(Vec::Zero(d));
    ev = obj.eval(pi);
    if (!std::isfinite(ev.f)) {
      throw AssumptionError("solver: wealth outside the utility domain at pi = 0");
    }
  }

  ConcaveMax out;
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    std::vector<int> free;
    for (int j = 0; j < d; ++j) {
      const bool pinned = (at_lower(A, pi, j) && ev.g(j) <= 0.0) ||
                          (at_upper(A, pi, j) && ev.g(j) >= 0.0);
      if (!pinned) free.push_back(j);
    }
    double gfree = 0.0;
    for (int j : free) gfree = std::max(gfree, std::abs(ev.g(j)));
    if (gfree <= opt.grad_tol * ev.scale) {
      converged = true;
      break;
    }
    const int nf = static_cast<int>(free.size());
    Mat Hf(nf, nf);
    Vec gf(nf);
    for (int a = 0; a < nf; ++a) {
      gf(a) = ev.g(free[a]);
      for (int b = 0; b < nf; ++b) Hf(a, b) = ev.H(free[a], free[b]);
    }
    Vec df;
    Eigen::LLT<Mat> llt(-Hf);
    if (llt.info() == Eigen::Success) {
      df = llt.solve(gf);
    } else {
      const double curv = std::max(Hf.diagonal().cwiseAbs().maxCoeff(), 1e-12);
      df = gf / curv;
    }
    if (!(gf.dot(df) > 0.0)) df = gf;
    Vec step = Vec::Zero(d);
    for (int a = 0; a < nf; ++a) step(free[a]) = df(a);

    bool accepted = false;
    Vec next = pi;
    double fnext = ev.f;
    for (double t = 1.0; t > 1e-20; t *= 0.5) {
      next = A.project(pi + t * step);
      fnext = obj.value(next);
      if (!std::isfinite(fnext)) continue;
      const double slope = ev.g.dot(next - pi);
      if (fnext >= ev.f + 1e-4 * slope - 1e-15 * (1.0 + std::abs(ev.f))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Round-off floor: no ascent step exists, accept a near-stationary point.
      converged = gfree <= 1e-9 * ev.scale;
      break;
    }
    const double moved = (next - pi).lpNorm<Eigen::Infinity>();
    pi = next;
    ev = obj.eval(pi);
    if (moved <= 1e-16 * (1.0 + pi.lpNorm<Eigen::Infinity>())) {
      converged = true;
      break;
    }
  }

  if (!converged && d == 1 && penalty == 0.0) {
    // Bisection on the (nonincreasing) derivative over the feasible interval.
    auto [lo, hi] = feasible_interval_1d(X, w, offsets, u, A);
    auto deriv = [&](double p) {
      Eval e = obj.eval(Vec::Constant(1, p));
      return std::isfinite(e.f) ? e.g(0) : std::numeric_limits<double>::quiet_NaN();
    };
    auto inside = [&](double edge, double toward) {
      // Step inside an open domain edge.
      if (std::isfinite(obj.value(Vec::Constant(1, edge)))) return edge;
      double gap = std::abs(toward - edge);
      for (int k = 0; k < 60; ++k) {
        gap *= 0.5;
        const double p = edge + (toward > edge ? gap : -gap);
        if (std::isfinite(obj.value(Vec::Constant(1, p)))) return p;
      }
      return toward;
    };
    double a = std::isfinite(lo) ? inside(lo, pi(0)) : pi(0) - 1.0;
    double b = std::isfinite(hi) ? inside(hi, pi(0)) : pi(0) + 1.0;
    for (int k = 0; k < 200 && !std::isfinite(lo) && deriv(a) < 0.0; ++k) a = pi(0) - 2.0 * (pi(0) - a);
    for (int k = 0; k < 200 && !std::isfinite(hi) && deriv(b) > 0.0; ++k) b = pi(0) + 2.0 * (b - pi(0));
    double root;
    if (deriv(a) <= 0.0) {
      root = a;
    } else if (deriv(b) >= 0.0) {
      root = b;
    } else {
      root = bisect_nonincreasing(deriv, a, b, 0.0, 400);
    }
    pi = Vec::Constant(1, root);
    ev = obj.eval(pi);
    converged = std::isfinite(ev.f);
  }
  if (!converged) {
    std::ostringstream os;
    os << "solver: no convergence after " << it << " iterations";
    throw NumericalError(os.str());
  }

  out.pi = pi;
  out.value = ev.f;
  out.gradient = ev.g;
  out.hessian = ev.H;
  out.iterations = it;
  for (int j = 0; j < d; ++j) {
    const double tol = 1e-9 * ev.scale;
    if ((at_lower(A, pi, j) && ev.g(j) < -tol) || (at_upper(A, pi, j) && ev.g(j) > tol)) {
      out.on_boundary = true;
    }
  }
  return out;
}

// ------------------------------------------------------------------ baseline

BaselineSolution solve_baseline(const ProblemSpec& spec, const SolverOptions& opt) {
  validate(spec);
  const int d = spec.dim();
  const ConcaveMax m = maximize_expected_utility(spec.model.points(), spec.model.weights(), Vec(),
                                                 spec.utility, spec.action, 0.0, Vec::Zero(d), opt);
  BaselineSolution sol;
  sol.pi_star = m.pi;
  sol.V0 = m.value;
  sol.foc_residual = m.gradient;
  sol.hessian = m.hessian;
  sol.on_boundary = m.on_boundary;
  sol.iterations = m.iterations;
  sol.pi_star_zero = m.pi.norm() <= opt.zero_threshold;
  if (!sol.on_boundary || sol.pi_star_zero) sol.q_u = q_u_measure(spec, sol);
  return sol;
}

DiscreteMeasure q_u_measure(const ProblemSpec& spec, const BaselineSolution& sol) {
  if (sol.on_boundary && !sol.pi_star_zero) {
    throw AssumptionError("q_u_measure: optimum on the boundary of the action space");
  }
  const DiscreteMeasure& P = spec.model;
  Vec w(P.size());
  for (int i = 0; i < P.size(); ++i) {
    w(i) = P.weight(i) * spec.utility.d1(P.point(i).dot(sol.pi_star));
  }
  return DiscreteMeasure::normalized(P.points(), w, P.state_space())
      .with_unbounded_support_flag(P.unbounded_support_model());
}

double davis_price(const ProblemSpec& spec, const BaselineSolution& sol, const Payoff& g) {
  const DiscreteMeasure Q = sol.q_u ? *sol.q_u : q_u_measure(spec, sol);
  const Payoff gp = g.prepared_for(spec.model);
  double s = 0.0;
  for (int i = 0; i < Q.size(); ++i) s += Q.weight(i) * gp.value(Q.point(i));
  return s;
}

double davis_epsilon_value(const ProblemSpec& spec, const Payoff& g, double eps, double p,
                           const Vec& start, Vec* argmax) {
  const DiscreteMeasure& P = spec.model;
  const Payoff gp = g.prepared_for(P);
  Vec c(P.size());
  for (int i = 0; i < P.size(); ++i) c(i) = -eps + eps * gp.value(P.point(i)) / p;
  SolverOptions opt;
  opt.grad_tol = 1e-15;
  const ConcaveMax m = maximize_expected_utility(P.points(), P.weights(), c, spec.utility,
                                                 spec.action, 0.0, start, opt);
  if (argmax) *argmax = m.pi;
  return m.value;
}

double davis_price_via_root(const ProblemSpec& spec, const Payoff& g, double lo, double hi,
                            const RootOptions& opt) {
  if (!(lo < hi) || lo * hi <= 0.0) {
    throw ConfigError("davis_price_via_root: bracket must satisfy lo < hi and exclude 0");
  }
  const BaselineSolution base = solve_baseline(spec);
  auto F = [&](double p) {
    const double vp = davis_epsilon_value(spec, g, opt.h, p, base.pi_star);
    const double vm = davis_epsilon_value(spec, g, -opt.h, p, base.pi_star);
    return (vp - vm) / (2.0 * opt.h);
  };
  const double flo = F(lo), fhi = F(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw ConfigError("davis_price_via_root: no sign change in the bracket");
  }
  std::uintmax_t iters = 200;
  auto tol = [&](double a, double b) { return std::abs(b - a) <= opt.xtol * std::max(1.0, std::abs(a)); };
  const auto r = boost::math::tools::toms748_solve(F, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace robustfolio
