// SPDX-License-Identifier: MIT
#include "robustfolio/robust_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robustfolio/errors.hpp"
#include "robustfolio/optimize.hpp"

namespace robustfolio {

namespace {

constexpr int kOracleAtomCap = 16;
constexpr double kZeroPi = 1e-10;

// ------------------------------------------------------------ inner oracle

struct AtomRange {
  double x, w, lo, hi;  // finite range of admissible destinations
};

struct InnerSpec {
  std::vector<AtomRange> atoms;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  double delta = 0.0;
  double p = 2.0;
};

struct Fragment {
  double y;
  double mass;
};

struct InnerOut {
  double value = 0.0;
  double dual = -kInf;
  double cost_p = 0.0;
  std::vector<Fragment> fragments;
};

std::vector<double> candidate_grid(const AtomRange& a, double delta, int n_uniform) {
  std::vector<double> g{a.x, a.lo, a.hi};
  auto add = [&](double y) {
    if (y >= a.lo && y <= a.hi) g.push_back(y);
  };
  for (int k = -48; k <= 40; ++k) {
    const double t = delta * std::pow(10.0, k / 8.0);
    add(a.x - t);
    add(a.x + t);
  }
  for (int i = 1; i < n_uniform; ++i) add(a.lo + (a.hi - a.lo) * i / n_uniform);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

InnerOut solve_inner(const InnerSpec& s, const OracleOptions& opt) {
  const int n = static_cast<int>(s.atoms.size());
  InnerOut out;
  double base = 0.0;
  for (const auto& a : s.atoms) base += a.w * s.phi(a.x);
  if (s.delta == 0.0) {
    out.value = out.dual = base;
    for (const auto& a : s.atoms) out.fragments.push_back({a.x, a.w});
    return out;
  }
  const double budget = std::pow(s.delta, s.p);

  std::vector<std::vector<double>> grid(n), phig(n), costg(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = candidate_grid(s.atoms[i], s.delta, opt.grid_points);
    for (double y : grid[i]) {
      phig[i].push_back(s.phi(y));
      costg[i].push_back(std::pow(std::abs(y - s.atoms[i].x), s.p));
    }
  }

  // Per-atom minimizers of phi(y) + lam |y - x|^p; returns (budget use, sum w h).
  auto solve_at = [&](double lam, std::vector<double>& ys) {
    ys.resize(n);
    double B = 0.0, H = 0.0;
    for (int i = 0; i < n; ++i) {
      const AtomRange& a = s.atoms[i];
      std::vector<double> vals(grid[i].size());
      for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = phig[i][j] + lam * costg[i][j];
      auto f = [&](double y) { return s.phi(y) + lam * std::pow(std::abs(y - a.x), s.p); };
      auto df = [&](double y) {
        const double t = y - a.x;
        const double c = t == 0.0 ? 0.0 : s.p * std::pow(std::abs(t), s.p - 1.0) * (t > 0 ? 1.0 : -1.0);
        return s.dphi(y) + lam * c;
      };
      const ScalarMin m = minimize_scanned(f, df, grid[i], vals);
      ys[i] = m.x;
      B += a.w * std::pow(std::abs(m.x - a.x), s.p);
      H += a.w * m.f;
    }
    return std::make_pair(B, H);
  };
  auto value_of = [&](const std::vector<double>& ys) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += s.atoms[i].w * s.phi(ys[i]);
    return v;
  };

  std::vector<double> ys_lo, ys_hi;
  auto [B0, H0] = solve_at(0.0, ys_lo);
  out.dual = H0;
  if (B0 <= budget) {
    out.value = value_of(ys_lo);
    out.cost_p = B0;
    for (int i = 0; i < n; ++i) out.fragments.push_back({ys_lo[i], s.atoms[i].w});
    return out;
  }
  double lam_lo = 0.0, B_lo = B0;
  double lam_hi = 1.0;
  auto [B_hi, H_hi] = solve_at(lam_hi, ys_hi);
  out.dual = std::max(out.dual, H_hi - lam_hi * budget);
  for (int k = 0; k < 400 && B_hi > budget; ++k) {
    lam_lo = lam_hi;
    B_lo = B_hi;
    ys_lo = ys_hi;
    lam_hi *= 8.0;
    std::tie(B_hi, H_hi) = solve_at(lam_hi, ys_hi);
    out.dual = std::max(out.dual, H_hi - lam_hi * budget);
  }
  if (B_hi > budget) throw NumericalError("adversary oracle: budget multiplier diverged");
  if (lam_lo == 0.0) {
    // Walk down from 1 to bracket the multiplier from below as well.
    double lam = lam_hi;
    std::vector<double> ys;
    for (int k = 0; k < 400; ++k) {
      lam /= 8.0;
      auto [B, H] = solve_at(lam, ys);
      out.dual = std::max(out.dual, H - lam * budget);
      if (B > budget) {
        lam_lo = lam;
        B_lo = B;
        ys_lo = ys;
        break;
      }
      lam_hi = lam;
      B_hi = B;
      ys_hi = ys;
    }
  }
  for (int it = 0; it < opt.lambda_iterations; ++it) {
    const double mid = lam_lo > 0.0 ? std::sqrt(lam_lo * lam_hi) : 0.5 * lam_hi;
    if (!(mid > lam_lo && mid < lam_hi) || lam_hi - lam_lo <= 1e-15 * lam_hi) break;
    std::vector<double> ys;
    auto [B, H] = solve_at(mid, ys);
    out.dual = std::max(out.dual, H - mid * budget);
    if (B > budget) {
      lam_lo = mid;
      B_lo = B;
      ys_lo = std::move(ys);
    } else {
      lam_hi = mid;
      B_hi = B;
      ys_hi = std::move(ys);
    }
  }
  const double theta = B_lo > B_hi ? std::clamp((budget - B_hi) / (B_lo - B_hi), 0.0, 1.0) : 0.0;
  out.value = theta * value_of(ys_lo) + (1.0 - theta) * value_of(ys_hi);
  out.cost_p = theta * B_lo + (1.0 - theta) * B_hi;
  for (int i = 0; i < n; ++i) {
    const double w = s.atoms[i].w;
    if (ys_lo[i] == ys_hi[i] || theta == 0.0 || theta == 1.0) {
      out.fragments.push_back({theta == 1.0 ? ys_lo[i] : ys_hi[i], w});
    } else {
      out.fragments.push_back({ys_lo[i], theta * w});
      out.fragments.push_back({ys_hi[i], (1.0 - theta) * w});
    }
  }

  // Budget concentration: one atom sends a fraction of its mass far.
  double best_conc = kInf;
  int best_i = -1;
  double best_y = 0.0, best_v = 0.0;
  for (int i = 0; i < n; ++i) {
    const AtomRange& a = s.atoms[i];
    const double phx = s.phi(a.x);
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
      const double c = costg[i][j];
      if (!(c > 0.0) || a.w <= 0.0) continue;
      const double v = std::min(1.0, budget / (a.w * c));
      const double val = base + a.w * v * (phig[i][j] - phx);
      if (val < best_conc) {
        best_conc = val;
        best_i = i;
        best_y = grid[i][j];
        best_v = v;
      }
    }
  }
  if (best_i >= 0 && best_conc < out.value - 1e-15 * (1.0 + std::abs(out.value))) {
    out.value = best_conc;
    out.fragments.clear();
    out.cost_p = 0.0;
    for (int i = 0; i < n; ++i) {
      const AtomRange& a = s.atoms[i];
      if (i != best_i) {
        out.fragments.push_back({a.x, a.w});
      } else {
        if (best_v < 1.0) out.fragments.push_back({a.x, (1.0 - best_v) * a.w});
        out.fragments.push_back({best_y, best_v * a.w});
        out.cost_p = best_v * a.w * std::pow(std::abs(best_y - a.x), s.p);
      }
    }
  }
  return out;
}

DiscreteMeasure fragments_measure(const std::vector<Fragment>& frags, const StateSpace& S) {
  std::vector<double> y, w;
  for (const auto& f : frags) {
    if (f.mass <= 0.0) continue;
    y.push_back(std::clamp(f.y, S.lower()(0), S.upper()(0)));
    w.push_back(f.mass);
  }
  Mat pts(1, y.size());
  for (std::size_t i = 0; i < y.size(); ++i) pts(0, i) = y[i];
  return DiscreteMeasure::normalized(pts, Eigen::Map<Vec>(w.data(), w.size()), S);
}

void check_oracle_input(const DiscreteMeasure& P, double delta, const WassersteinOrder& order,
                        const OracleOptions& opt) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("oracle: need finite delta >= 0");
  if (order.is_inf()) throw ConfigError("oracle: finite p only");
  if (P.dim() != 1) throw ConfigError("oracle: d = 1 only");
  if (P.size() > kOracleAtomCap) throw ConfigError("oracle: at most 16 atoms");
  if (opt.fragments < 2 || opt.fragments > 4) throw ConfigError("oracle: fragments must be in [2, 4]");
}

double far_cap(const DiscreteMeasure& P, double delta) {
  const double spread = P.points().maxCoeff() - P.points().minCoeff();
  return std::max({1e3 * delta, 10.0 * spread, 10.0});
}

InnerResult to_result(const InnerOut& o, const DiscreteMeasure& P, double p) {
  InnerResult r;
  r.value = o.value;
  r.dual_bound = o.dual;
  r.coupling_cost = std::pow(std::max(o.cost_p, 0.0), 1.0 / p);
  r.adversary = fragments_measure(o.fragments, P.state_space());
  return r;
}

InnerResult minus_infinity(const DiscreteMeasure& P) {
  InnerResult r;
  r.value = -kInf;
  r.dual_bound = -kInf;
  r.adversary = P;
  return r;
}

RobustSolution from_baseline(const ProblemSpec& spec, const BaselineSolution& b, RobustMethod m) {
  RobustSolution s;
  s.delta = 0.0;
  s.V_delta = b.V0;
  s.pi_delta = b.pi_star;
  s.adversary = spec.model;
  s.transport_cost = 0.0;
  s.method = m;
  s.pi_delta_zero = b.pi_star_zero;
  return s;
}

}  // namespace

InnerResult adversary_inner_inf(const DiscreteMeasure& P, const Utility& u, const Vec& pi,
                                double delta, const WassersteinOrder& order,
                                const OracleOptions& opt) {
  check_oracle_input(P, delta, order, opt);
  if (pi.size() != 1) throw ConfigError("oracle: pi dimension mismatch");
  const double p0 = pi(0);
  if (p0 == 0.0) {
    InnerResult r;
    r.value = r.dual_bound = u.value(0.0);
    r.adversary = P;
    return r;
  }
  const StateSpace& S = P.state_space();
  const double L = u.domain_lower();
  const double cap = far_cap(P, delta);
  InnerSpec s;
  s.delta = delta;
  s.p = order.p;
  s.phi = [&u, p0](double y) { return u.value(p0 * y); };
  s.dphi = [&u, p0](double y) { return p0 * u.d1(p0 * y); };
  for (int i = 0; i < P.size(); ++i) {
    const double x = P.points()(0, i);
    if (!u.in_domain(p0 * x)) return minus_infinity(P);
    AtomRange a{x, P.weight(i), x, x};
    if (p0 > 0.0) {
      a.lo = S.lower()(0);
      if (std::isfinite(L) && L / p0 >= a.lo) {
        if (!std::isfinite(u.value(L))) return minus_infinity(P);
        a.lo = std::nextafter(L / p0, kInf);
      }
      if (!std::isfinite(a.lo)) a.lo = x - cap;
    } else {
      a.hi = S.upper()(0);
      if (std::isfinite(L) && L / p0 <= a.hi) {
        if (!std::isfinite(u.value(L))) return minus_infinity(P);
        a.hi = std::nextafter(L / p0, -kInf);
      }
      if (!std::isfinite(a.hi)) a.hi = x + cap;
    }
    s.atoms.push_back(a);
  }
  return to_result(solve_inner(s, opt), P, order.p);
}

InnerResult payoff_inner_inf(const DiscreteMeasure& P, const Payoff& g, double delta,
                             const WassersteinOrder& order, const OracleOptions& opt) {
  check_oracle_input(P, delta, order, opt);
  const Payoff gp = g.prepared_for(P);
  const StateSpace& S = P.state_space();
  const double cap = far_cap(P, delta);
  InnerSpec s;
  s.delta = delta;
  s.p = order.p;
  s.phi = [&gp](double y) { return gp.value(y); };
  s.dphi = [&gp](double y) { return gp.derivative(y); };
  for (int i = 0; i < P.size(); ++i) {
    const double x = P.points()(0, i);
    s.atoms.push_back({x, P.weight(i), std::max(S.lower()(0), x - cap),
                       std::min(S.upper()(0), x + cap)});
  }
  return to_result(solve_inner(s, opt), P, order.p);
}

// ------------------------------------------------------------------ p = inf

RobustSolution robust_solve_inf(const ProblemSpec& spec, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("robust: need finite delta >= 0");
  const BaselineSolution base = solve_baseline(spec);
  if (delta == 0.0) return from_baseline(spec, base, RobustMethod::inf_exact);
  const DiscreteMeasure& P = spec.model;
  const Utility& u = spec.utility;
  const int d = spec.dim();
  RobustSolution sol;
  sol.delta = delta;
  sol.method = RobustMethod::inf_exact;
  const double u0 = u.value(0.0);

  if (d == 1) {
    const StateSpace& S = P.state_space();
    Mat down = P.points(), up = P.points();
    for (int i = 0; i < P.size(); ++i) {
      down(0, i) = std::max(P.points()(0, i) - delta, S.lower()(0));
      up(0, i) = std::min(P.points()(0, i) + delta, S.upper()(0));
    }
    double best = u0;
    double best_pi = 0.0;
    const Mat* best_pts = nullptr;
    auto half = [&](const Mat& pts, double lo, double hi) {
      if (lo > hi) return;
      const ActionSpace A = ActionSpace::interval(lo, hi);
      const Vec start = A.project(base.pi_star);
      const ConcaveMax m =
          maximize_expected_utility(pts, P.weights(), Vec(), u, A, 0.0, start);
      if (m.value > best && std::abs(m.pi(0)) > kZeroPi) {
        best = m.value;
        best_pi = m.pi(0);
        best_pts = &pts;
      }
    };
    half(down, std::max(spec.action.lower(0), 0.0), spec.action.upper(0));
    half(up, spec.action.lower(0), std::min(spec.action.upper(0), 0.0));
    sol.V_delta = best;
    sol.pi_delta = Vec::Constant(1, best_pi);
    sol.pi_delta_zero = best_pts == nullptr;
    sol.adversary = best_pts ? DiscreteMeasure::normalized(*best_pts, P.weights(), S)
                             : P;
  } else {
    const ConcaveMax m = maximize_expected_utility(P.points(), P.weights(), Vec(), u, spec.action,
                                                   delta, base.pi_star);
    if (m.value > u0 && m.pi.norm() > kZeroPi) {
      sol.V_delta = m.value;
      sol.pi_delta = m.pi;
      const Vec shift = -delta * m.pi / m.pi.norm();
      sol.adversary = translate(P, shift, ClipMode::error);
    } else {
      sol.V_delta = u0;
      sol.pi_delta = Vec::Zero(d);
      sol.pi_delta_zero = true;
      sol.adversary = P;
    }
  }
  sol.transport_cost = wasserstein_distance(P, sol.adversary, spec.order);
  return sol;
}

// ------------------------------------------------------------------ finite p

RobustSolution robust_solve_p(const ProblemSpec& spec, double delta, const OracleOptions& opt) {
  validate(spec);
  growth_guard(spec, opt.guard);
  check_oracle_input(spec.model, delta, spec.order, opt);
  const BaselineSolution base = solve_baseline(spec);
  if (delta == 0.0) return from_baseline(spec, base, RobustMethod::finite_p_oracle);

  const DiscreteMeasure& P = spec.model;
  const Utility& u = spec.utility;
  const StateSpace& S = P.state_space();
  auto inner = [&](double pi) {
    return adversary_inner_inf(P, u, Vec::Constant(1, pi), delta, spec.order, opt);
  };
  auto f = [&](double pi) { return inner(pi).value; };

  const double r = 3.0 * std::abs(base.pi_star(0)) + 1.0;
  double a = std::max(spec.action.lower(0), -r);
  double b = std::min(spec.action.upper(0), r);
  const double L = u.domain_lower();
  if (std::isfinite(L)) {
    if (S.lower()(0) < 0.0) b = std::min(b, L / S.lower()(0));
    if (S.upper()(0) > 0.0) a = std::max(a, L / S.upper()(0));
  }
  ScalarMin best = golden_section_max(f, a, b, opt.outer_tol);
  const double u0 = u.value(0.0);
  if (u0 >= best.f - 1e-15 * (1.0 + std::abs(u0))) best = {0.0, u0};

  if (opt.polish && best.x != 0.0) {
    // Danskin: d/dpi of the inner value is E_{P*}[Y u'(pi Y)].
    auto danskin = [&](double pi) {
      const InnerResult ir = inner(pi);
      double s = 0.0;
      for (int i = 0; i < ir.adversary.size(); ++i) {
        const double y = ir.adversary.points()(0, i);
        s += ir.adversary.weight(i) * y * u.d1(pi * y);
      }
      return s;
    };
    const double h = 4.0 * opt.outer_tol;
    const double lo = std::max(a, best.x - h), hi = std::min(b, best.x + h);
    if (lo < hi && danskin(lo) > 0.0 && danskin(hi) < 0.0) {
      const double x = bisect_nonincreasing(danskin, lo, hi, 0.0, 80);
      const double fx = f(x);
      if (fx >= best.f - 1e-14 * (1.0 + std::abs(best.f))) best = {x, fx};
    }
  }

  RobustSolution sol;
  sol.delta = delta;
  sol.method = RobustMethod::finite_p_oracle;
  sol.pi_delta = Vec::Constant(1, best.x);
  sol.pi_delta_zero = std::abs(best.x) <= kZeroPi;
  if (sol.pi_delta_zero) {
    sol.pi_delta.setZero();
    sol.V_delta = u0;
    sol.adversary = P;
  } else {
    const InnerResult ir = inner(best.x);
    sol.V_delta = ir.value;
    sol.adversary = ir.adversary;
    sol.certificate_gap = ir.value - ir.dual_bound;
  }
  sol.transport_cost = wasserstein_distance(P, sol.adversary, spec.order);
  return sol;
}

RobustSolution robust_solve(const ProblemSpec& spec, double delta, const OracleOptions& opt) {
  return spec.order.is_inf() ? robust_solve_inf(spec, delta) : robust_solve_p(spec, delta, opt);
}

RobustGrid robust_solve_grid(const ProblemSpec& spec, const std::vector<double>& deltas,
                             const OracleOptions& opt) {
  std::vector<double> ds = deltas;
  std::sort(ds.begin(), ds.end());
  RobustGrid g;
  for (double d : ds) g.solutions.push_back(robust_solve(spec, d, opt));
  for (std::size_t k = 1; k < g.solutions.size(); ++k) {
    const double prev = g.solutions[k - 1].V_delta, cur = g.solutions[k].V_delta;
    if (cur > prev + 1e-12 * (1.0 + std::abs(prev))) g.monotone = false;
  }
  return g;
}

// ------------------------------------------------------------- Davis price

double robust_davis_price(const ProblemSpec& spec, const RobustSolution& sol, const Payoff& g,
                          const OracleOptions& opt) {
  const DiscreteMeasure& P = spec.model;
  if (!sol.pi_delta_zero) {
    const DiscreteMeasure& A = sol.adversary;
    const Payoff gp = g.prepared_for(A);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < A.size(); ++i) {
      const double m = A.weight(i) * spec.utility.d1(A.point(i).dot(sol.pi_delta));
      num += m * gp.value(A.point(i));
      den += m;
    }
    return num / den;
  }
  const Payoff gp = g.prepared_for(P);
  if (sol.delta == 0.0) {
    double s = 0.0;
    for (int i = 0; i < P.size(); ++i) s += P.weight(i) * gp.value(P.point(i));
    return s;
  }
  if (P.dim() != 1) throw ConfigError("robust_davis_price: pi = 0 branch needs d = 1");
  if (!spec.order.is_inf()) return payoff_inner_inf(P, g, sol.delta, spec.order, opt).value;
  // p = inf: each atom independently moves to the minimum of g within delta.
  const StateSpace& S = P.state_space();
  auto f = [&gp](double y) { return gp.value(y); };
  auto df = [&gp](double y) { return gp.derivative(y); };
  double s = 0.0;
  for (int i = 0; i < P.size(); ++i) {
    const double x = P.points()(0, i);
    const double lo = std::max(x - sol.delta, S.lower()(0));
    const double hi = std::min(x + sol.delta, S.upper()(0));
    std::vector<double> grid{lo, hi, x};
    for (int k = 1; k < 64; ++k) grid.push_back(lo + (hi - lo) * k / 64.0);
    for (double kink : g.kinks()) {
      for (double e : {kink - g.smoothing(), kink, kink + g.smoothing()}) {
        if (e > lo && e < hi) grid.push_back(e);
      }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    s += P.weight(i) * minimize_scanned(f, df, grid).f;
  }
  return s;
}

double robust_davis_price(const ProblemSpec& spec, const Payoff& g, double delta,
                          const OracleOptions& opt) {
  return robust_davis_price(spec, robust_solve(spec, delta, opt), g, opt);
}

double robust_davis_first_order(const ProblemSpec& spec, const Payoff& g, double delta) {
  const BaselineSolution base = solve_baseline(spec);
  if (base.pi_star_zero || base.on_boundary) {
    throw AssumptionError("robust_davis_first_order: requires an interior pi* != 0");
  }
  const DiscreteMeasure& P = spec.model;
  const Payoff gp = g.prepared_for(P);
  const Vec pi = base.pi_star + delta * optimizer_sensitivity(spec, base).pi_prime0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < P.size(); ++i) {
    const Vec x = P.point(i);
    const Vec y = x - delta * transport_direction(spec, base, x);
    const double m = P.weight(i) * spec.utility.d1(y.dot(pi));
    num += m * gp.value(y);
    den += m;
  }
  return num / den;
}

double martingale_check_robust(const ProblemSpec& spec, const RobustSolution& sol) {
  if (sol.pi_delta_zero) throw AssumptionError("martingale_check_robust: requires pi_delta != 0");
  const DiscreteMeasure& A = sol.adversary;
  Vec m = Vec::Zero(A.dim());
  double den = 0.0;
  for (int i = 0; i < A.size(); ++i) {
    const double q = A.weight(i) * spec.utility.d1(A.point(i).dot(sol.pi_delta));
    m += q * A.point(i);
    den += q;
  }
  return (m / den).norm();
}

}  // namespace robustfolio
