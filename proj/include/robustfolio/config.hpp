// SPDX-License-Identifier: MIT
/**
 * @file config.hpp
 * @brief JSON run configuration for the command-line front end.
 *
 * The accepted keys are listed in docs/config-schema.json. Unknown keys,
 * wrong types and out-of-range values raise ConfigError.
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "robustfolio/baseline_solver.hpp"
#include "robustfolio/measures.hpp"
#include "robustfolio/payoff.hpp"
#include "robustfolio/robust_solver.hpp"
#include "robustfolio/utility.hpp"

namespace robustfolio {

struct UtilityDescriptor {
  enum class Kind { log, exponential, power, capped_exponential };
  Kind kind = Kind::log;
  double w0 = 1.0;
  double gamma = 1.0;
  double eta = 2.0;
  double kappa = 0.01;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> grid;
};

struct FixtureSelection {
  std::string name;
  std::map<std::string, double> params;
};

struct RunConfig {
  ModelDescriptor model;
  UtilityDescriptor utility;
  double wasserstein_p = kInf;
  double action_lower = -kInf;
  double action_upper = kInf;
  std::optional<nlohmann::json> payoff;  // validated by build_payoff
  std::vector<double> deltas;            // from delta or delta_grid
  std::optional<SweepSpec> sweep;
  std::string output_path;
  std::string output_format = "csv";
  OracleOptions oracle;
  std::optional<FixtureSelection> fixture;
  nlohmann::json source;  // the document as parsed, for the provenance hash
};

/// Top-level keys accepted by parse_config.
const std::vector<std::string>& config_keys();

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// "a:b:step" inclusive of both ends (b included up to step/1e6).
std::vector<double> parse_range(const std::string& text);

Utility build_utility(const UtilityDescriptor& d);
Payoff build_payoff(const nlohmann::json& j);
ProblemSpec build_problem(const RunConfig& cfg);

/// Sets a sweepable parameter by name: a, mu, sigma, radius, nodes, gamma,
/// kappa, eta, w0, p, delta.
void apply_parameter(RunConfig& cfg, const std::string& name, double value);
const std::vector<std::string>& sweep_parameters();

}  // namespace robustfolio
