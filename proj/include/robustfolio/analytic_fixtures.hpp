// SPDX-License-Identifier: MIT
/**
 * @file analytic_fixtures.hpp
 * @brief Closed-form ground truth for the binomial, normal, capped
 * exponential and lognormal butterfly examples, plus the Black-Scholes
 * helper E[(e^Z - k)^+].
 */
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace robustfolio {

/// A named closed-form example. `values` holds scalar closed forms, `curves`
/// closed forms in one argument (delta, q or a, as the key says).
struct Fixture {
  std::string name;
  std::map<std::string, double> params;
  std::string description;
  std::map<std::string, double> values;
  std::map<std::string, std::function<double(double)>> curves;

  double value(const std::string& key) const;
  double curve(const std::string& key, double arg) const;
};

/// Catalog: binomial_log {a}, binomial_exp {a, gamma}, normal_exp {mu, sigma,
/// gamma}, capped_exp_limit {mu, sigma, gamma, q}, lognormal_butterfly
/// {mu, sigma, K}. Missing parameters take documented defaults; unknown
/// names, unknown parameters and out-of-range values raise ConfigError.
Fixture fixture(const std::string& name, const std::map<std::string, double>& params = {});

std::vector<std::string> fixture_names();

/// E[(e^Z - k)^+] for Z ~ N(mu, sigma^2).
double bs_value(double k, double mu, double sigma);

/// Standard normal distribution function.
double normal_cdf(double x);

}  // namespace robustfolio
