// SPDX-License-Identifier: MIT
#include "robustfolio/analytic_fixtures.hpp"

#include <cmath>
#include <set>

#include "robustfolio/errors.hpp"

namespace robustfolio {

double Fixture::value(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("fixture " + name + ": no value '" + key + "'");
  return it->second;
}

double Fixture::curve(const std::string& key, double arg) const {
  auto it = curves.find(key);
  if (it == curves.end()) throw ConfigError("fixture " + name + ": no curve '" + key + "'");
  return it->second(arg);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double bs_value(double k, double mu, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("bs_value: need sigma > 0");
  const double fwd = std::exp(mu + 0.5 * sigma * sigma);
  if (k <= 0.0) return fwd - k;
  const double d1 = (mu + sigma * sigma - std::log(k)) / sigma;
  const double d2 = d1 - sigma;
  return fwd * normal_cdf(d1) - k * normal_cdf(d2);
}

namespace {

using Params = std::map<std::string, double>;

Params with_defaults(const std::string& name, const Params& given, const Params& defaults) {
  Params out = defaults;
  for (const auto& [k, v] : given) {
    if (!defaults.count(k)) throw ConfigError("fixture " + name + ": unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError("fixture " + name + ": non-finite parameter '" + k + "'");
    out[k] = v;
  }
  return out;
}

void require(bool ok, const std::string& name, const std::string& what) {
  if (!ok) throw ConfigError("fixture " + name + ": " + what);
}

Fixture binomial_log(const Params& given) {
  Fixture f;
  f.name = "binomial_log";
  f.params = with_defaults(f.name, given, {{"a", 0.25}, {"x0", 0.5}});
  const double a = f.params["a"], x0 = f.params["x0"];
  require(a > 0.0 && a < 0.5, f.name, "need a in (0, 1/2)");
  require(x0 > 0.0 && x0 < 1.0, f.name, "need x0 in (0, 1)");
  f.description = "P = a d(-1) + (1-a) d(1), u = log(1 + x)";
  const double l1 = std::log(2.0 * a), l2 = std::log(2.0 - 2.0 * a);
  f.values["pi_star"] = 1.0 - 2.0 * a;
  f.values["V0"] = a * l1 + (1.0 - a) * l2;
  f.values["V_prime0_inf"] = -(1.0 - 2.0 * a);
  f.values["pi_prime0_inf"] = -1.0;
  f.values["davis_price_cube"] = 0.0;
  f.values["davis_price_call0"] = 0.5;
  f.values["davis_prime0_cube_inf"] = -2.0;
  f.values["davis_prime0_call0_inf"] = 0.0;
  const double m = a * l1 + (1.0 - a) * l2;
  f.values["kl_V_prime0"] = -std::sqrt(2.0 * (a * l1 * l1 + (1.0 - a) * l2 * l2 - m * m));
  f.curves["pi_prime0(q)"] = [a](double q) {
    return -a * (1.0 - a) * std::pow(std::pow(a, 1.0 - q) + std::pow(1.0 - a, 1.0 - q), 1.0 / q - 1.0) *
           (std::pow(a, -q) + std::pow(1.0 - a, -q));
  };
  // General-q Davis sensitivity for g = x^3, with pi*'(0) entering the
  // recentred terms.
  auto pi_prime = f.curves["pi_prime0(q)"];
  f.curves["davis_prime0_cube(q)"] = [a, pi_prime](double q) {
    const double c = std::pow(std::pow(a, 1.0 - q) + std::pow(1.0 - a, 1.0 - q), 1.0 / q - 1.0);
    const double C = std::pow(2.0, q - 1.0) * c;
    const double tm = std::pow(2.0 * a, 1.0 - q) * C, tp = std::pow(2.0 * (1.0 - a), 1.0 - q) * C;
    const double pp = pi_prime(q);
    return -1.0 / (4.0 * a) * (tm * (1.0 - 2.0 * a) + pp) + 1.0 / (4.0 * (1.0 - a)) * (tp * (1.0 - 2.0 * a) - pp) -
           1.5 * (tm + tp);
  };
  // Displayed variant: the same expression with pi*'(0) frozen at its q = 1
  // value -1, so it agrees with davis_prime0_cube(q) at q = 1 only.
  f.curves["davis_prime0_cube_displayed(q)"] = [a](double q) {
    const double c = std::pow(std::pow(a, 1.0 - q) + std::pow(1.0 - a, 1.0 - q), 1.0 / q - 1.0);
    const double t1 = -1.0 / (4.0 * a) *
                      (std::pow(2.0 * a, 1.0 - q) * (1.0 - 2.0 * a) * std::pow(2.0, q - 1.0) * c - 1.0);
    const double t2 = 1.0 / (4.0 * (1.0 - a)) *
                      (std::pow(2.0 * (1.0 - a), 1.0 - q) * (1.0 - 2.0 * a) * std::pow(2.0, q - 1.0) * c + 1.0);
    const double t3 = -1.5 * (std::pow(a, 1.0 - q) + std::pow(1.0 - a, 1.0 - q)) * c;
    return t1 + t2 + t3;
  };
  f.curves["V_delta_inf(delta)"] = [a](double d) {
    return a * std::log(2.0 * a / (1.0 - d)) + (1.0 - a) * std::log((-2.0 + 2.0 * a) / (-1.0 - d));
  };
  f.curves["pi_delta_inf(delta)"] = [a](double d) {
    return ((1.0 - a) * (1.0 - d) - a * (1.0 + d)) / ((1.0 - d) * (1.0 + d));
  };
  f.curves["robust_davis_cube_inf(delta)"] = [](double d) { return -2.0 * d + 2.0 * d * d * d; };
  f.curves["robust_davis_call0_inf(delta)"] = [](double d) { return 0.5 * (1.0 - d * d); };
  f.values["davis_price_abs"] = 1.0;
  f.curves["robust_davis_abs_inf(delta)"] = [x0](double d) { return 1.0 - d * d + d * x0; };
  return f;
}

Fixture binomial_exp(const Params& given) {
  Fixture f;
  f.name = "binomial_exp";
  f.params = with_defaults(f.name, given, {{"a", 0.25}, {"gamma", 1.0}});
  const double a = f.params["a"], g = f.params["gamma"];
  require(a > 0.0 && a < 0.5, f.name, "need a in (0, 1/2)");
  require(g > 0.0, f.name, "need gamma > 0");
  f.description = "P = a d(-1) + (1-a) d(1), u = -exp(-gamma x)";
  const double pi = std::log(a / (1.0 - a)) / (-2.0 * g);
  f.values["pi_star"] = pi;
  f.values["V0"] = -2.0 * std::sqrt(a * (1.0 - a));
  f.values["kl_V_prime0"] = -std::sqrt(2.0 * (1.0 - 4.0 * a * (1.0 - a)));
  auto bracket = [a](double q) {
    const double r = a / (1.0 - a);
    return std::pow(a * std::pow(r, -q / 2.0) + (1.0 - a) * std::pow(r, q / 2.0), 1.0 / q);
  };
  // ||u'||_q carries a factor gamma; the displayed expression omits it.
  f.curves["V_prime0(q)"] = [bracket, g, pi](double q) { return -g * bracket(q) * pi; };
  f.curves["V_prime0_displayed(q)"] = [bracket, pi](double q) { return -bracket(q) * pi; };
  return f;
}

Fixture normal_exp(const Params& given) {
  Fixture f;
  f.name = "normal_exp";
  f.params = with_defaults(f.name, given, {{"mu", 0.1}, {"sigma", 0.2}, {"gamma", 1.0}});
  const double mu = f.params["mu"], s = f.params["sigma"], g = f.params["gamma"];
  require(s > 0.0, f.name, "need sigma > 0");
  require(g > 0.0, f.name, "need gamma > 0");
  f.description = "P = N(mu, sigma^2), u = -exp(-gamma x)";
  const double s2 = s * s;
  f.values["pi_star"] = mu / (g * s2);
  f.values["V0"] = -std::exp(-mu * mu / (2.0 * s2));
  f.values["V_prime0_inf"] = -std::exp(-mu * mu / (2.0 * s2)) * mu / s2;
  f.values["pi_prime0_inf"] = -1.0 / (g * s2);
  f.values["davis_price_square"] = s2;
  f.values["davis_prime0_inf"] = 0.0;
  f.curves["V_delta_inf(delta)"] = [mu, s2](double d) {
    return -std::exp(-(mu - d) * (mu - d) / (2.0 * s2));
  };
  f.curves["pi_delta_inf(delta)"] = [mu, s2, g](double d) { return (mu - d) / (g * s2); };
  f.curves["robust_davis_square_inf(delta)"] = [s2](double) { return s2; };
  return f;
}

Fixture capped_exp_limit(const Params& given) {
  Fixture f;
  f.name = "capped_exp_limit";
  f.params = with_defaults(f.name, given, {{"mu", 0.1}, {"sigma", 0.2}, {"gamma", 1.0}, {"q", 1.0}});
  const double mu = f.params["mu"], s = f.params["sigma"], g = f.params["gamma"], q = f.params["q"];
  require(s > 0.0, f.name, "need sigma > 0");
  require(g > 0.0, f.name, "need gamma > 0");
  require(q >= 1.0, f.name, "need q >= 1");
  f.description = "kappa -> 0 limits for the capped exponential utility under N(mu, sigma^2)";
  const double s2 = s * s, m2 = mu * mu / s2;
  f.values["V_prime0_limit"] = -std::exp(-m2 + q * m2 / 2.0) * mu / s2;
  f.values["pi_prime0_limit_displayed"] =
      -std::pow(g, 1.0 / q + q - 3.0) / s2 * std::exp((q - 1.0) / 2.0) * (1.0 - m2 * (1.0 - q));
  f.values["pi_prime0_limit_derived"] =
      -1.0 / (g * s2) * std::exp((q - 1.0) * m2 / 2.0) * (1.0 - m2 * (1.0 - q));
  return f;
}

Fixture lognormal_butterfly(const Params& given) {
  Fixture f;
  f.name = "lognormal_butterfly";
  f.params = with_defaults(f.name, given, {{"mu", -1.0}, {"sigma", 0.25}, {"K", 0.8}});
  const double mu = f.params["mu"], s = f.params["sigma"], K = f.params["K"];
  require(s > 0.0, f.name, "need sigma > 0");
  require(mu < -0.5 * s * s, f.name, "need mu < -sigma^2 / 2");
  require(K > 0.0, f.name, "need K > 0");
  f.description = "X = e^Z - 1, Z ~ N(mu, sigma^2), u = log(1 + x), A = [0, 1], butterfly payoff";
  f.values["pi_star"] = 0.0;
  auto price = [mu, s, K](double d) {
    return bs_value(1.0 - K + d, mu, s) - 2.0 * bs_value(1.0 + d, mu, s) + bs_value(1.0 + K + d, mu, s);
  };
  // d/dk of bs_value is -Phi(d2) for k > 0 and -1 for k <= 0.
  auto dbs = [mu, s](double k) {
    if (k <= 0.0) return -1.0;
    return -normal_cdf((mu - std::log(k)) / s);
  };
  f.values["davis_price"] = price(0.0);
  f.values["shift_slope_at_0"] = dbs(1.0 - K) - 2.0 * dbs(1.0) + dbs(1.0 + K);
  f.curves["shift_price(delta)"] = price;
  return f;
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"binomial_log", "binomial_exp", "normal_exp", "capped_exp_limit", "lognormal_butterfly"};
}

Fixture fixture(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "binomial_log") return binomial_log(params);
  if (name == "binomial_exp") return binomial_exp(params);
  if (name == "normal_exp") return normal_exp(params);
  if (name == "capped_exp_limit") return capped_exp_limit(params);
  if (name == "lognormal_butterfly") return lognormal_butterfly(params);
  throw ConfigError("fixture: unknown name '" + name + "'");
}

}  // namespace robustfolio
