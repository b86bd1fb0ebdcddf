// SPDX-License-Identifier: MIT
#include "robustfolio/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <thread>

#include <CLI11.hpp>

#include "robustfolio/analytic_fixtures.hpp"
#include "robustfolio/baseline_solver.hpp"
#include "robustfolio/errors.hpp"
#include "robustfolio/robust_solver.hpp"
#include "robustfolio/sensitivity.hpp"

namespace robustfolio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using RowFn = std::function<std::vector<double>(std::size_t)>;

/// Evaluates rows concurrently; results are stored by index and the first
/// failing index (in grid order) is rethrown.
std::vector<std::vector<double>> parallel_rows(std::size_t n, unsigned threads, const RowFn& f) {
  std::vector<std::vector<double>> out(n);
  std::vector<std::exception_ptr> err(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = f(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<std::string> vec_columns(const std::string& name, int d) {
  if (d == 1) return {name};
  std::vector<std::string> out;
  for (int k = 0; k < d; ++k) out.push_back(name + "_" + std::to_string(k));
  return out;
}

void push_vec(std::vector<double>& row, const Vec& v, int d) {
  for (int k = 0; k < d; ++k) row.push_back(v.size() == d ? v(k) : kNaN);
}

template <class T>
void append(std::vector<T>& a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

double opt_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

double sharpe_or_nan(const DiscreteMeasure& P) {
  if (P.dim() != 1) return kNaN;
  return moments(P).sharpe();
}

std::string order_label(double p) {
  if (std::isinf(p)) return "p_inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "p_%g", p);
  return buf;
}

WassersteinOrder order_of(double p) {
  return std::isinf(p) ? WassersteinOrder::infinity() : WassersteinOrder::finite(p);
}

std::vector<double> need_deltas(const RunConfig& cfg, const std::string& command) {
  if (cfg.deltas.empty()) throw ConfigError(command + ": needs delta or delta_grid");
  return cfg.deltas;
}

ResultTable cmd_solve(const RunConfig& cfg) {
  const ProblemSpec spec = build_problem(cfg);
  const BaselineSolution sol = solve_baseline(spec);
  const int d = spec.dim();
  ResultTable t;
  t.columns = vec_columns("pi_star", d);
  append(t.columns, {"V0", "on_boundary", "pi_star_zero"});
  if (spec.payoff) t.columns.push_back("davis_price");
  std::vector<double> row;
  push_vec(row, sol.pi_star, d);
  append(row, {sol.V0, sol.on_boundary ? 1.0 : 0.0, sol.pi_star_zero ? 1.0 : 0.0});
  if (spec.payoff) row.push_back(davis_price(spec, sol, *spec.payoff));
  t.add_row(row);
  return t;
}

std::vector<std::string> report_columns(int d) {
  std::vector<std::string> c = {"q"};
  append(c, vec_columns("pi_star", d));
  c.push_back("V0");
  c.push_back("V_prime0");
  append(c, vec_columns("pi_prime0", d));
  append(c, {"kappa_u", "davis_price", "davis_prime0", "kl_V_prime0", "pi_star_zero_branch"});
  return c;
}

std::vector<double> report_row(const SensitivityReport& r, int d) {
  std::vector<double> row = {r.q};
  push_vec(row, r.pi_star, d);
  row.push_back(r.V0);
  row.push_back(r.V_prime0);
  push_vec(row, r.pi_prime0, d);
  append(row, {r.kappa_u, opt_or_nan(r.davis_price), opt_or_nan(r.davis_prime0), opt_or_nan(r.kl_V_prime0),
               r.branch == Branch::pi_star_zero ? 1.0 : 0.0});
  return row;
}

ResultTable cmd_sensitivity(const RunConfig& cfg) {
  const ProblemSpec spec = build_problem(cfg);
  const BaselineSolution sol = solve_baseline(spec);
  const SensitivityReport rep = sensitivity_report(spec, sol, cfg.oracle.guard);
  ResultTable t;
  t.columns = report_columns(spec.dim());
  t.add_row(report_row(rep, spec.dim()));
  t.provenance["formulas"] = rep.provenance;
  return t;
}

ResultTable cmd_robust(const RunConfig& cfg) {
  const ProblemSpec spec = build_problem(cfg);
  const std::vector<double> deltas = need_deltas(cfg, "robust");
  const RobustGrid grid = robust_solve_grid(spec, deltas, cfg.oracle);
  const int d = spec.dim();
  ResultTable t;
  t.columns = {"delta", "V_delta"};
  append(t.columns, vec_columns("pi_delta", d));
  append(t.columns, {"transport_cost", "certificate_gap", "pi_delta_zero", "finite_p_oracle"});
  if (spec.payoff) t.columns.push_back("robust_davis");
  for (const RobustSolution& s : grid.solutions) {
    std::vector<double> row = {s.delta, s.V_delta};
    push_vec(row, s.pi_delta, d);
    append(row, {s.transport_cost, s.certificate_gap, s.pi_delta_zero ? 1.0 : 0.0,
                 s.method == RobustMethod::finite_p_oracle ? 1.0 : 0.0});
    if (spec.payoff) row.push_back(robust_davis_price(spec, s, *spec.payoff, cfg.oracle));
    t.add_row(row);
  }
  t.provenance["monotone"] = grid.monotone ? "true" : "false";
  return t;
}

ResultTable cmd_davis(const RunConfig& cfg) {
  const ProblemSpec spec = build_problem(cfg);
  if (!spec.payoff) throw ConfigError("davis: needs a payoff");
  const Payoff& g = *spec.payoff;
  const BaselineSolution sol = solve_baseline(spec);
  const double price = davis_price(spec, sol, g);
  const double slope = davis_sensitivity(spec, sol, g, cfg.oracle.guard);
  const bool interior = !sol.pi_star_zero && !sol.on_boundary;
  std::vector<double> deltas = cfg.deltas.empty() ? std::vector<double>{0.0} : cfg.deltas;
  ResultTable t;
  t.columns = {"delta", "davis_price", "davis_prime0", "robust_davis", "first_order"};
  for (double delta : deltas) {
    const double robust = robust_davis_price(spec, g, delta, cfg.oracle);
    const double first = interior ? robust_davis_first_order(spec, g, delta) : kNaN;
    t.add_row({delta, price, slope, robust, first});
  }
  return t;
}

std::vector<std::string> sweep_columns(const std::string& param, int d) {
  std::vector<std::string> c = {param, "sharpe"};
  append(c, vec_columns("pi_star", d));
  c.push_back("V0");
  c.push_back("V_prime0");
  append(c, vec_columns("pi_prime0", d));
  append(c, {"kappa_u", "davis_price", "davis_prime0", "kl_V_prime0"});
  return c;
}

ResultTable cmd_sweep(const RunConfig& cfg, unsigned threads) {
  if (!cfg.sweep) throw ConfigError("sweep: needs a parameter and a grid");
  const SweepSpec sw = *cfg.sweep;
  int d = 0;
  {
    RunConfig first = cfg;
    apply_parameter(first, sw.parameter, sw.grid.front());
    d = make_model(first.model).dim();
  }
  auto row = [&](std::size_t i) {
    RunConfig c = cfg;
    apply_parameter(c, sw.parameter, sw.grid[i]);
    const ProblemSpec spec = build_problem(c);
    if (spec.dim() != d) throw ConfigError("sweep: dimension changes along the grid");
    const BaselineSolution sol = solve_baseline(spec);
    const SensitivityReport r = sensitivity_report(spec, sol, c.oracle.guard);
    std::vector<double> out = {sw.grid[i], sharpe_or_nan(spec.model)};
    push_vec(out, r.pi_star, d);
    out.push_back(r.V0);
    out.push_back(r.V_prime0);
    push_vec(out, r.pi_prime0, d);
    append(out, {r.kappa_u, opt_or_nan(r.davis_price), opt_or_nan(r.davis_prime0), opt_or_nan(r.kl_V_prime0)});
    return out;
  };
  ResultTable t;
  t.columns = sweep_columns(sw.parameter, d);
  for (auto& r : parallel_rows(sw.grid.size(), threads, row)) t.add_row(std::move(r));
  return t;
}

// ---- oracle-check -------------------------------------------------------

struct Check {
  std::string label;
  double expected;
  double actual;
};

ProblemSpec spec_of(DiscreteMeasure P, Utility u, WassersteinOrder o, std::optional<Payoff> g = std::nullopt,
                    ActionSpace A = ActionSpace::whole(1)) {
  return ProblemSpec(std::move(P), u, std::move(A), o, std::move(g));
}

double q_to_p(double q) { return q == 1.0 ? kInf : q / (q - 1.0); }

void checks_binomial_log(const Fixture& f, std::vector<Check>& out) {
  const double a = f.params.at("a"), x0 = f.params.at("x0");
  const DiscreteMeasure P = binomial_model(a);
  const DiscreteMeasure P_R = P.with_state_space(StateSpace::whole(1));
  const Utility u = Utility::log_shifted();
  const auto n = f.name + ".";
  {
    const ProblemSpec s = spec_of(P, u, WassersteinOrder::infinity());
    const BaselineSolution b = solve_baseline(s);
    out.push_back({n + "pi_star", f.value("pi_star"), b.pi_star(0)});
    out.push_back({n + "V0", f.value("V0"), b.V0});
    out.push_back({n + "V_prime0_inf", f.value("V_prime0_inf"), value_sensitivity(s, b)});
    out.push_back({n + "pi_prime0_inf", f.value("pi_prime0_inf"), optimizer_sensitivity(s, b).pi_prime0(0)});
    out.push_back({n + "kl_V_prime0", f.value("kl_V_prime0"), kl_value_sensitivity(s, b)});
  }
  for (double q : {1.5, 2.0, 2.5}) {
    const ProblemSpec s = spec_of(P, u, WassersteinOrder::finite(q_to_p(q)), Payoff::power(3));
    const BaselineSolution b = solve_baseline(s);
    char lab[64];
    std::snprintf(lab, sizeof lab, "(q=%g)", q);
    out.push_back({n + "pi_prime0" + lab, f.curve("pi_prime0(q)", q), optimizer_sensitivity(s, b).pi_prime0(0)});
    const double dp = davis_sensitivity(s, b, Payoff::power(3));
    out.push_back({n + "davis_prime0_cube" + lab, f.curve("davis_prime0_cube(q)", q), dp});
    out.push_back({n + "davis_prime0_cube_displayed" + lab, f.curve("davis_prime0_cube_displayed(q)", q), dp});
  }
  {
    const ProblemSpec s = spec_of(P, u, WassersteinOrder::infinity());
    const BaselineSolution b = solve_baseline(s);
    out.push_back({n + "davis_price_cube", f.value("davis_price_cube"), davis_price(s, b, Payoff::power(3))});
    out.push_back({n + "davis_price_call0", f.value("davis_price_call0"), davis_price(s, b, Payoff::call(0.0))});
    out.push_back({n + "davis_price_abs", f.value("davis_price_abs"), davis_price(s, b, Payoff::abs_shift(x0))});
    out.push_back({n + "davis_prime0_cube_inf", f.value("davis_prime0_cube_inf"),
                   davis_sensitivity(s, b, Payoff::power(3))});
    out.push_back({n + "davis_prime0_call0_inf", f.value("davis_prime0_call0_inf"),
                   davis_sensitivity(s, b, Payoff::call(0.0))});
  }
  const ProblemSpec sR = spec_of(P_R, u, WassersteinOrder::infinity());
  for (double delta : {0.05, 0.1}) {
    const RobustSolution r = robust_solve_inf(sR, delta);
    char lab[64];
    std::snprintf(lab, sizeof lab, "(delta=%g)", delta);
    out.push_back({n + "V_delta_inf" + lab, f.curve("V_delta_inf(delta)", delta), r.V_delta});
    out.push_back({n + "pi_delta_inf" + lab, f.curve("pi_delta_inf(delta)", delta), r.pi_delta(0)});
    out.push_back({n + "robust_davis_cube_inf" + lab, f.curve("robust_davis_cube_inf(delta)", delta),
                   robust_davis_price(sR, r, Payoff::power(3))});
    out.push_back({n + "robust_davis_call0_inf" + lab, f.curve("robust_davis_call0_inf(delta)", delta),
                   robust_davis_price(sR, r, Payoff::call(0.0))});
    out.push_back({n + "robust_davis_abs_inf" + lab, f.curve("robust_davis_abs_inf(delta)", delta),
                   robust_davis_price(sR, r, Payoff::abs_shift(x0))});
  }
}

void checks_binomial_exp(const Fixture& f, std::vector<Check>& out) {
  const DiscreteMeasure P = binomial_model(f.params.at("a"));
  const Utility u = Utility::exponential(f.params.at("gamma"));
  const auto n = f.name + ".";
  const ProblemSpec s = spec_of(P, u, WassersteinOrder::infinity());
  const BaselineSolution b = solve_baseline(s);
  out.push_back({n + "pi_star", f.value("pi_star"), b.pi_star(0)});
  out.push_back({n + "V0", f.value("V0"), b.V0});
  out.push_back({n + "kl_V_prime0", f.value("kl_V_prime0"), kl_value_sensitivity(s, b)});
  for (double q : {1.0, 1.5, 2.0, 2.5}) {
    const ProblemSpec sq = spec_of(P, u, order_of(q_to_p(q)));
    char lab[64];
    std::snprintf(lab, sizeof lab, "(q=%g)", q);
    out.push_back({n + "V_prime0" + lab, f.curve("V_prime0(q)", q), value_sensitivity(sq, solve_baseline(sq))});
  }
}

void checks_normal_exp(const Fixture& f, std::vector<Check>& out) {
  const double mu = f.params.at("mu"), sigma = f.params.at("sigma");
  const DiscreteMeasure P = normal_model(mu, sigma);
  const Utility u = Utility::exponential(f.params.at("gamma"));
  const auto n = f.name + ".";
  const Payoff sq = Payoff::power(2);
  const ProblemSpec s = spec_of(P, u, WassersteinOrder::infinity(), sq);
  const BaselineSolution b = solve_baseline(s);
  out.push_back({n + "pi_star", f.value("pi_star"), b.pi_star(0)});
  out.push_back({n + "V0", f.value("V0"), b.V0});
  out.push_back({n + "V_prime0_inf", f.value("V_prime0_inf"), value_sensitivity(s, b)});
  out.push_back({n + "pi_prime0_inf", f.value("pi_prime0_inf"), optimizer_sensitivity(s, b).pi_prime0(0)});
  out.push_back({n + "davis_price_square", f.value("davis_price_square"), davis_price(s, b, sq)});
  out.push_back({n + "davis_prime0_inf", f.value("davis_prime0_inf"), davis_sensitivity(s, b, sq)});
  for (double delta : {0.02, 0.05}) {
    const RobustSolution r = robust_solve_inf(s, delta);
    char lab[64];
    std::snprintf(lab, sizeof lab, "(delta=%g)", delta);
    out.push_back({n + "V_delta_inf" + lab, f.curve("V_delta_inf(delta)", delta), r.V_delta});
    out.push_back({n + "pi_delta_inf" + lab, f.curve("pi_delta_inf(delta)", delta), r.pi_delta(0)});
    out.push_back({n + "robust_davis_square_inf" + lab, f.curve("robust_davis_square_inf(delta)", delta),
                   robust_davis_price(s, r, sq)});
  }
}

void checks_capped_exp_limit(const Fixture& f, std::vector<Check>& out) {
  const double mu = f.params.at("mu"), sigma = f.params.at("sigma"), gamma = f.params.at("gamma");
  const double q = f.params.at("q");
  const DiscreteMeasure P = normal_model(mu, sigma);
  const Utility u = Utility::capped_exponential(gamma, 1e-4);
  const ProblemSpec s = spec_of(P, u, order_of(q_to_p(q)));
  SensitivityOptions opt;
  opt.growth_guard = false;
  const BaselineSolution b = solve_baseline(s);
  const auto n = f.name + ".";
  const double pi_prime = optimizer_sensitivity(s, b, opt).pi_prime0(0);
  out.push_back({n + "V_prime0_limit", f.value("V_prime0_limit"), value_sensitivity(s, b, opt)});
  out.push_back({n + "pi_prime0_limit_derived", f.value("pi_prime0_limit_derived"), pi_prime});
  out.push_back({n + "pi_prime0_limit_displayed", f.value("pi_prime0_limit_displayed"), pi_prime});
}

void checks_lognormal_butterfly(const Fixture& f, std::vector<Check>& out) {
  const double mu = f.params.at("mu"), sigma = f.params.at("sigma"), K = f.params.at("K");
  const Payoff g = Payoff::butterfly(K, 0.0);
  const DiscreteMeasure P = shifted_lognormal_model(mu, sigma, 128, g.kinks());
  const ProblemSpec s = spec_of(P, Utility::log_shifted(), WassersteinOrder::infinity(), g,
                                ActionSpace::interval(0.0, 1.0));
  const BaselineSolution b = solve_baseline(s);
  const auto n = f.name + ".";
  out.push_back({n + "pi_star", f.value("pi_star"), b.pi_star(0)});
  out.push_back({n + "davis_price", f.value("davis_price"), davis_price(s, b, g)});
  for (double delta : {0.05, 0.1}) {
    std::vector<double> moved;
    for (double k : g.kinks()) moved.push_back(k + delta);
    const double shifted = shifted_lognormal_model(mu, sigma, 128, moved).expect([&](const Vec& x) {
      return g.value(x(0) - delta);
    });
    char lab[64];
    std::snprintf(lab, sizeof lab, "(delta=%g)", delta);
    out.push_back({n + "shift_price_vs_quadrature" + lab, f.curve("shift_price(delta)", delta), shifted});
    out.push_back({n + "shift_price_vs_robust_davis" + lab, f.curve("shift_price(delta)", delta),
                   robust_davis_price(s, g, delta)});
  }
}

ResultTable cmd_oracle_check(const RunConfig& cfg) {
  std::vector<Fixture> fixtures;
  if (cfg.fixture) {
    fixtures.push_back(fixture(cfg.fixture->name, cfg.fixture->params));
  } else {
    for (const auto& name : fixture_names()) fixtures.push_back(fixture(name));
  }
  std::vector<Check> checks;
  for (const Fixture& f : fixtures) {
    if (f.name == "binomial_log") checks_binomial_log(f, checks);
    else if (f.name == "binomial_exp") checks_binomial_exp(f, checks);
    else if (f.name == "normal_exp") checks_normal_exp(f, checks);
    else if (f.name == "capped_exp_limit") checks_capped_exp_limit(f, checks);
    else if (f.name == "lognormal_butterfly") checks_lognormal_butterfly(f, checks);
  }
  ResultTable t;
  t.columns = {"fixture", "module", "abs_error"};
  for (const Check& c : checks) t.add_row({c.expected, c.actual, std::abs(c.expected - c.actual)}, c.label);
  return t;
}

// ---- figures --------------------------------------------------------------

/// Binomial a-grid ordered by increasing Sharpe ratio: 0.45 down to 0.01 in
/// steps of 0.01, then a log tail down to 1e-8.
std::vector<double> binomial_a_grid() {
  std::vector<double> a;
  for (int k = 45; k >= 1; --k) a.push_back(k / 100.0);
  for (int k = 9; k <= 32; ++k) a.push_back(std::pow(10.0, -k / 4.0));
  return a;
}

double binomial_sharpe(double a) { return (1.0 - 2.0 * a) / (2.0 * std::sqrt(a * (1.0 - a))); }

ResultTable figure_binomial(const Utility& u, const std::vector<double>& ps, bool kl,
                            const std::function<double(const ProblemSpec&, const BaselineSolution&)>& y,
                            unsigned threads) {
  const std::vector<double> grid = binomial_a_grid();
  ResultTable t;
  t.columns = {"a", "sharpe"};
  for (double p : ps) t.columns.push_back(order_label(p));
  if (kl) t.columns.push_back("kl");
  auto row = [&](std::size_t i) {
    const double a = grid[i];
    std::vector<double> out = {a, binomial_sharpe(a)};
    const DiscreteMeasure P = binomial_model(a);
    BaselineSolution b;
    for (double p : ps) {
      const ProblemSpec s(P, u, ActionSpace::whole(1), order_of(p), Payoff::power(3));
      b = solve_baseline(s);
      out.push_back(y(s, b));
    }
    if (kl) out.push_back(kl_value_sensitivity(ProblemSpec(P, u, ActionSpace::whole(1)), b));
    return out;
  };
  for (auto& r : parallel_rows(grid.size(), threads, row)) t.add_row(std::move(r));
  return t;
}

ResultTable figure1(unsigned threads) {
  const std::vector<double> mus = {0.5, 1.0, 2.0};
  std::vector<double> sharpe;
  for (int k = 1; k <= 80; ++k) sharpe.push_back(0.05 * k);
  ResultTable t;
  t.columns = {"sharpe"};
  for (double mu : mus) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "mu_%g", mu);
    t.columns.push_back(buf);
  }
  auto row = [&](std::size_t i) {
    std::vector<double> out = {sharpe[i]};
    for (double mu : mus) {
      const double sigma = mu / sharpe[i];
      const ProblemSpec s(normal_model(mu, sigma), Utility::exponential(1.0), ActionSpace::whole(1));
      out.push_back(-value_sensitivity(s, solve_baseline(s)));
    }
    return out;
  };
  for (auto& r : parallel_rows(sharpe.size(), threads, row)) t.add_row(std::move(r));
  t.provenance["series"] = "-V_prime0, normal model, u=-exp(-x), p=inf, sigma=mu/sharpe";
  return t;
}

ResultTable figure4(unsigned threads) {
  const std::vector<double> ps = {kInf, 4.0, 2.0, 1.5};
  std::vector<double> mu;
  for (int k = 1; k <= 60; ++k) mu.push_back(0.05 * k);
  ResultTable t;
  t.columns = {"sharpe"};
  for (double p : ps) t.columns.push_back(order_label(p));
  auto row = [&](std::size_t i) {
    std::vector<double> out = {mu[i]};
    for (double p : ps) {
      const ProblemSpec s(normal_model(mu[i], 1.0), Utility::capped_exponential(1.0, 0.01), ActionSpace::whole(1),
                          order_of(p));
      out.push_back(optimizer_sensitivity(s, solve_baseline(s)).pi_prime0(0));
    }
    return out;
  };
  for (auto& r : parallel_rows(mu.size(), threads, row)) t.add_row(std::move(r));
  t.provenance["series"] = "pi_prime0, normal(mu, 1), capped exponential gamma=1 kappa=0.01";
  return t;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"solve", "sensitivity", "robust",      "davis",
                                             "sweep", "figures",     "oracle-check"};
  return c;
}

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> f = {"fig1",      "fig2-left",  "fig2-right",
                                             "fig3-left", "fig3-right", "fig4"};
  return f;
}

ResultTable make_figure(const std::string& name, unsigned threads) {
  const std::vector<double> all_p = {kInf, 4.0, 2.5, 2.0, 1.5};
  const std::vector<double> three_p = {kInf, 2.0, 1.5};
  auto V = [](const ProblemSpec& s, const BaselineSolution& b) { return value_sensitivity(s, b); };
  auto Pi = [](const ProblemSpec& s, const BaselineSolution& b) { return optimizer_sensitivity(s, b).pi_prime0(0); };
  auto Dv = [](const ProblemSpec& s, const BaselineSolution& b) { return davis_sensitivity(s, b, Payoff::power(3)); };
  ResultTable t;
  if (name == "fig1") {
    t = figure1(threads);
  } else if (name == "fig2-left") {
    t = figure_binomial(Utility::log_shifted(), all_p, true, V, threads);
    t.provenance["series"] = "V_prime0, binomial model, u=log(1+x)";
  } else if (name == "fig2-right") {
    t = figure_binomial(Utility::exponential(1.0), all_p, true, V, threads);
    t.provenance["series"] = "V_prime0, binomial model, u=-exp(-x)";
  } else if (name == "fig3-left") {
    t = figure_binomial(Utility::log_shifted(), three_p, false, Pi, threads);
    t.provenance["series"] = "pi_prime0, binomial model, u=log(1+x)";
  } else if (name == "fig3-right") {
    t = figure_binomial(Utility::log_shifted(), three_p, false, Dv, threads);
    t.provenance["series"] = "davis_prime0 for g=x^3, binomial model, u=log(1+x)";
  } else if (name == "fig4") {
    t = figure4(threads);
  } else {
    throw ConfigError("figures: unknown preset '" + name + "'");
  }
  t.provenance["figure"] = name;
  return t;
}

ResultTable run(const std::string& command, const RunConfig& cfg, const std::string& figure, unsigned threads) {
  ResultTable t;
  if (command == "solve") t = cmd_solve(cfg);
  else if (command == "sensitivity") t = cmd_sensitivity(cfg);
  else if (command == "robust") t = cmd_robust(cfg);
  else if (command == "davis") t = cmd_davis(cfg);
  else if (command == "sweep") t = cmd_sweep(cfg, threads);
  else if (command == "figures") t = make_figure(figure, threads);
  else if (command == "oracle-check") t = cmd_oracle_check(cfg);
  else throw ConfigError("unknown command '" + command + "'");
  t.provenance["command"] = command;
  t.provenance["version"] = kVersion;
  t.provenance["config_hash"] = fnv1a_hex(command + "|" + figure + "|" + cfg.source.dump());
  return t;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const AssumptionError*>(&e)) return 3;
  return 4;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Wasserstein-robust expected utility: solvers, sensitivities and figure data"};
  std::string command, figure, config_path, out_path, format, delta_grid, sweep;
  std::optional<double> delta;
  unsigned threads = 0;
  app.add_option("command", command, "solve | sensitivity | robust | davis | sweep | figures | oracle-check")
      ->required();
  app.add_option("figure", figure, "figure preset for `figures`");
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "csv or json");
  auto* d1 = app.add_option("--delta", delta, "single radius");
  auto* d2 = app.add_option("--delta-grid", delta_grid, "radii a:b:step");
  d1->excludes(d2);
  app.add_option("--sweep", sweep, "param=a:b:step");
  app.add_option("--threads", threads, "worker threads for sweeps (0 = all cores)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (command != "figures" && command != "oracle-check") {
      throw ConfigError(command + ": --config is required");
    }
    if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
      throw ConfigError("unknown command '" + command + "'");
    }
    if (command == "figures" && figure.empty()) throw ConfigError("figures: name a preset");
    if (delta) {
      nlohmann::json doc = cfg.source;
      doc.erase("delta_grid");
      doc["delta"] = *delta;
      cfg = parse_config(doc);
    }
    if (!delta_grid.empty()) {
      nlohmann::json doc = cfg.source;
      doc.erase("delta");
      doc["delta_grid"] = delta_grid;
      cfg = parse_config(doc);
    }
    if (!sweep.empty()) {
      const auto eq = sweep.find('=');
      if (eq == std::string::npos) throw ConfigError("--sweep: expected param=a:b:step");
      nlohmann::json doc = cfg.source;
      doc["sweep"] = {{"parameter", sweep.substr(0, eq)}, {"grid", sweep.substr(eq + 1)}};
      cfg = parse_config(doc);
    }
    if (!format.empty()) {
      if (format != "csv" && format != "json") throw ConfigError("--format: expected csv or json");
      cfg.output_format = format;
    }
    if (!out_path.empty()) cfg.output_path = out_path;
    const ResultTable t = run(command, cfg, figure, threads);
    const std::string text = cfg.output_format == "json" ? to_json(t) : to_csv(t);
    if (cfg.output_path.empty()) {
      std::cout << text;
    } else {
      write_file(cfg.output_path, text);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "robustfolio: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace robustfolio
