// SPDX-License-Identifier: MIT
#include "robustfolio/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "robustfolio/errors.hpp"

namespace robustfolio {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

/// Numbers, or the strings "inf" / "-inf"; null means +-inf per `null_as`.
double number(const json& j, const std::string& where, double null_as = std::nan("")) {
  if (j.is_number()) return j.get<double>();
  if (j.is_null() && !std::isnan(null_as)) return null_as;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ConfigError(where + ": expected a number");
}

double finite_number(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!std::isfinite(v)) throw ConfigError(where + ": expected a finite number");
  return v;
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (j.is_string()) return parse_range(j.get<std::string>());
  if (j.is_object()) {
    only_keys(j, where, {"start", "stop", "step"});
    if (!j.contains("start") || !j.contains("stop") || !j.contains("step")) {
      throw ConfigError(where + ": range needs start, stop and step");
    }
    const double a = finite_number(j["start"], where + ".start");
    const double b = finite_number(j["stop"], where + ".stop");
    const double h = finite_number(j["step"], where + ".step");
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g:%.17g:%.17g", a, b, h);
    return parse_range(buf);
  }
  if (!j.is_array()) throw ConfigError(where + ": expected an array, a range object or \"a:b:step\"");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(finite_number(v, where));
  return out;
}

ModelDescriptor parse_model(const json& j) {
  only_keys(j, "model",
            {"kind", "a", "mu", "sigma", "radius", "nodes", "points", "weights", "state_space", "breakpoints"});
  if (!j.contains("kind")) throw ConfigError("model: missing 'kind'");
  ModelDescriptor d;
  const std::string kind = text(j["kind"], "model.kind");
  if (kind == "binomial") d.kind = ModelDescriptor::Kind::binomial;
  else if (kind == "normal") d.kind = ModelDescriptor::Kind::normal;
  else if (kind == "shifted_lognormal") d.kind = ModelDescriptor::Kind::shifted_lognormal;
  else if (kind == "truncated_normal") d.kind = ModelDescriptor::Kind::truncated_normal;
  else if (kind == "explicit") d.kind = ModelDescriptor::Kind::explicit_points;
  else throw ConfigError("model.kind: unknown '" + kind + "'");
  if (j.contains("a")) d.a = finite_number(j["a"], "model.a");
  if (j.contains("mu")) d.mu = finite_number(j["mu"], "model.mu");
  if (j.contains("sigma")) d.sigma = finite_number(j["sigma"], "model.sigma");
  if (j.contains("radius")) d.radius = finite_number(j["radius"], "model.radius");
  if (j.contains("nodes")) {
    if (!j["nodes"].is_number_integer()) throw ConfigError("model.nodes: expected an integer");
    d.nodes = j["nodes"].get<int>();
  }
  if (j.contains("breakpoints")) {
    if (d.kind == ModelDescriptor::Kind::binomial || d.kind == ModelDescriptor::Kind::explicit_points) {
      throw ConfigError("model.breakpoints: only for normal, shifted_lognormal and truncated_normal");
    }
    d.breakpoints = number_list(j["breakpoints"], "model.breakpoints");
  }
  if (d.kind == ModelDescriptor::Kind::explicit_points) {
    if (!j.contains("points") || !j.contains("weights")) {
      throw ConfigError("model: explicit kind needs 'points' and 'weights'");
    }
    const json& pts = j["points"];
    if (!pts.is_array() || pts.empty()) throw ConfigError("model.points: expected a nonempty array");
    const int n = static_cast<int>(pts.size());
    int dim = 1;
    if (pts[0].is_array()) dim = static_cast<int>(pts[0].size());
    if (dim < 1) throw ConfigError("model.points: empty atom");
    d.points = Mat(dim, n);
    for (int i = 0; i < n; ++i) {
      if (pts[i].is_array()) {
        if (static_cast<int>(pts[i].size()) != dim) throw ConfigError("model.points: ragged atoms");
        for (int k = 0; k < dim; ++k) d.points(k, i) = finite_number(pts[i][k], "model.points");
      } else {
        if (dim != 1) throw ConfigError("model.points: ragged atoms");
        d.points(0, i) = finite_number(pts[i], "model.points");
      }
    }
    const std::vector<double> w = number_list(j["weights"], "model.weights");
    if (static_cast<int>(w.size()) != n) throw ConfigError("model.weights: size differs from points");
    d.weights = Eigen::Map<const Vec>(w.data(), n);
  } else if (j.contains("points") || j.contains("weights")) {
    throw ConfigError("model: points/weights only apply to the explicit kind");
  }
  if (j.contains("state_space")) {
    const json& s = j["state_space"];
    only_keys(s, "model.state_space", {"lower", "upper"});
    const double lo = s.contains("lower") ? number(s["lower"], "model.state_space.lower", -kInf) : -kInf;
    const double hi = s.contains("upper") ? number(s["upper"], "model.state_space.upper", kInf) : kInf;
    d.has_state_space = true;
    d.state_space = StateSpace::interval(lo, hi);
  }
  return d;
}

UtilityDescriptor parse_utility(const json& j) {
  only_keys(j, "utility", {"kind", "w0", "gamma", "eta", "kappa"});
  if (!j.contains("kind")) throw ConfigError("utility: missing 'kind'");
  UtilityDescriptor d;
  const std::string kind = text(j["kind"], "utility.kind");
  if (kind == "log") d.kind = UtilityDescriptor::Kind::log;
  else if (kind == "exponential") d.kind = UtilityDescriptor::Kind::exponential;
  else if (kind == "power") d.kind = UtilityDescriptor::Kind::power;
  else if (kind == "capped_exponential") d.kind = UtilityDescriptor::Kind::capped_exponential;
  else throw ConfigError("utility.kind: unknown '" + kind + "'");
  if (j.contains("w0")) d.w0 = finite_number(j["w0"], "utility.w0");
  if (j.contains("gamma")) d.gamma = finite_number(j["gamma"], "utility.gamma");
  if (j.contains("eta")) d.eta = finite_number(j["eta"], "utility.eta");
  if (j.contains("kappa")) d.kappa = finite_number(j["kappa"], "utility.kappa");
  return d;
}

double parse_order(const json& j) {
  const double p = number(j, "wasserstein_p");
  if (std::isinf(p) && p > 0) return p;
  if (!(p > 1.0)) throw ConfigError("wasserstein_p: need p > 1 or \"inf\"");
  return p;
}

void check_deltas(const std::vector<double>& deltas) {
  for (double d : deltas) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("delta: need finite delta >= 0");
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"model",  "utility", "wasserstein_p", "action_space",
                                                "payoff", "delta",   "delta_grid",    "sweep",
                                                "output", "oracle",  "fixture"};
  return keys;
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {"a",     "mu",    "sigma", "radius", "nodes", "gamma",
                                                 "kappa", "eta",   "w0",    "p",      "delta"};
  return names;
}

std::vector<double> parse_range(const std::string& s) {
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ConfigError("range '" + s + "': expected a:b:step");
  double a, b, h;
  try {
    std::size_t used = 0;
    const std::string sa = s.substr(0, c1), sb = s.substr(c1 + 1, c2 - c1 - 1), sh = s.substr(c2 + 1);
    a = std::stod(sa, &used);
    if (used != sa.size()) throw ConfigError("");
    b = std::stod(sb, &used);
    if (used != sb.size()) throw ConfigError("");
    h = std::stod(sh, &used);
    if (used != sh.size()) throw ConfigError("");
  } catch (const std::exception&) {
    throw ConfigError("range '" + s + "': expected a:b:step");
  }
  if (!std::isfinite(a) || !std::isfinite(b) || !(h > 0.0) || !std::isfinite(h) || b < a) {
    throw ConfigError("range '" + s + "': need a <= b and step > 0");
  }
  const double span = (b - a) / h;
  if (span > 1e6) throw ConfigError("range '" + s + "': too many points");
  const long n = static_cast<long>(std::floor(span + 1e-6)) + 1;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + static_cast<double>(i) * h;
  return out;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  {
    const auto& keys = config_keys();
    for (const auto& item : doc.items()) {
      if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
        throw ConfigError("config: unknown key '" + item.key() + "'");
      }
    }
  }
  RunConfig cfg;
  cfg.source = doc;
  if (doc.contains("model")) cfg.model = parse_model(doc["model"]);
  if (doc.contains("utility")) cfg.utility = parse_utility(doc["utility"]);
  if (doc.contains("wasserstein_p")) cfg.wasserstein_p = parse_order(doc["wasserstein_p"]);
  if (doc.contains("action_space")) {
    const json& a = doc["action_space"];
    only_keys(a, "action_space", {"lower", "upper"});
    if (a.contains("lower")) cfg.action_lower = number(a["lower"], "action_space.lower", -kInf);
    if (a.contains("upper")) cfg.action_upper = number(a["upper"], "action_space.upper", kInf);
    if (!(cfg.action_lower <= cfg.action_upper)) throw ConfigError("action_space: lower > upper");
  }
  if (doc.contains("payoff")) {
    build_payoff(doc["payoff"]);
    cfg.payoff = doc["payoff"];
  }
  if (doc.contains("delta") && doc.contains("delta_grid")) {
    throw ConfigError("config: give either delta or delta_grid");
  }
  if (doc.contains("delta")) cfg.deltas = {number(doc["delta"], "delta")};
  if (doc.contains("delta_grid")) cfg.deltas = number_list(doc["delta_grid"], "delta_grid");
  check_deltas(cfg.deltas);
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    only_keys(s, "sweep", {"parameter", "grid"});
    if (!s.contains("parameter") || !s.contains("grid")) throw ConfigError("sweep: needs parameter and grid");
    SweepSpec sw;
    sw.parameter = text(s["parameter"], "sweep.parameter");
    const auto& names = sweep_parameters();
    if (std::find(names.begin(), names.end(), sw.parameter) == names.end()) {
      throw ConfigError("sweep.parameter: unknown '" + sw.parameter + "'");
    }
    sw.grid = number_list(s["grid"], "sweep.grid");
    if (sw.grid.empty()) throw ConfigError("sweep.grid: empty");
    cfg.sweep = sw;
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    only_keys(o, "output", {"path", "format"});
    if (o.contains("path")) cfg.output_path = text(o["path"], "output.path");
    if (o.contains("format")) cfg.output_format = text(o["format"], "output.format");
    if (cfg.output_format != "csv" && cfg.output_format != "json") {
      throw ConfigError("output.format: expected csv or json");
    }
  }
  if (doc.contains("oracle")) {
    const json& o = doc["oracle"];
    only_keys(o, "oracle", {"fragments", "grid_points", "outer_tol", "growth_guard"});
    if (o.contains("fragments")) {
      cfg.oracle.fragments = static_cast<int>(finite_number(o["fragments"], "oracle.fragments"));
      if (cfg.oracle.fragments < 2 || cfg.oracle.fragments > 4) {
        throw ConfigError("oracle.fragments: need 2 <= K <= 4");
      }
    }
    if (o.contains("grid_points")) {
      cfg.oracle.grid_points = static_cast<int>(finite_number(o["grid_points"], "oracle.grid_points"));
      if (cfg.oracle.grid_points < 8) throw ConfigError("oracle.grid_points: need at least 8");
    }
    if (o.contains("outer_tol")) {
      cfg.oracle.outer_tol = finite_number(o["outer_tol"], "oracle.outer_tol");
      if (!(cfg.oracle.outer_tol > 0.0)) throw ConfigError("oracle.outer_tol: need > 0");
    }
    if (o.contains("growth_guard")) {
      if (!o["growth_guard"].is_boolean()) throw ConfigError("oracle.growth_guard: expected a boolean");
      cfg.oracle.guard.growth_guard = o["growth_guard"].get<bool>();
    }
  }
  if (doc.contains("fixture")) {
    const json& f = doc["fixture"];
    only_keys(f, "fixture", {"name", "params"});
    if (!f.contains("name")) throw ConfigError("fixture: missing 'name'");
    FixtureSelection sel;
    sel.name = text(f["name"], "fixture.name");
    if (f.contains("params")) {
      if (!f["params"].is_object()) throw ConfigError("fixture.params: expected an object");
      for (const auto& item : f["params"].items()) {
        sel.params[item.key()] = finite_number(item.value(), "fixture.params." + item.key());
      }
    }
    cfg.fixture = sel;
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

Utility build_utility(const UtilityDescriptor& d) {
  switch (d.kind) {
    case UtilityDescriptor::Kind::log:
      return Utility::log_shifted(d.w0);
    case UtilityDescriptor::Kind::exponential:
      return Utility::exponential(d.gamma);
    case UtilityDescriptor::Kind::power:
      return Utility::power(d.eta, d.w0);
    case UtilityDescriptor::Kind::capped_exponential:
      return Utility::capped_exponential(d.gamma, d.kappa);
  }
  throw ConfigError("utility: unknown kind");
}

Payoff build_payoff(const json& j) {
  only_keys(j, "payoff", {"kind", "k", "strike", "K", "x0", "c", "x", "y", "terms", "smoothing", "asset"});
  if (!j.contains("kind")) throw ConfigError("payoff: missing 'kind'");
  const std::string kind = text(j["kind"], "payoff.kind");
  const double s = j.contains("smoothing") ? finite_number(j["smoothing"], "payoff.smoothing") : kDefaultSmoothing;
  auto need = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError("payoff: " + kind + " needs '" + key + "'");
    return finite_number(j[key], std::string("payoff.") + key);
  };
  Payoff g = Payoff::constant(0.0);
  if (kind == "power") {
    if (!j.contains("k") || !j["k"].is_number_integer()) throw ConfigError("payoff: power needs integer 'k'");
    g = Payoff::power(j["k"].get<int>());
  } else if (kind == "call") {
    g = Payoff::call(need("strike"), s);
  } else if (kind == "butterfly") {
    g = Payoff::butterfly(need("K"), s);
  } else if (kind == "abs_shift") {
    g = Payoff::abs_shift(need("x0"), s);
  } else if (kind == "constant") {
    g = Payoff::constant(need("c"));
  } else if (kind == "table") {
    if (!j.contains("x") || !j.contains("y")) throw ConfigError("payoff: table needs 'x' and 'y'");
    g = Payoff::table(number_list(j["x"], "payoff.x"), number_list(j["y"], "payoff.y"));
  } else if (kind == "combination") {
    if (!j.contains("terms") || !j["terms"].is_array()) throw ConfigError("payoff: combination needs 'terms'");
    std::vector<std::pair<double, Payoff>> terms;
    for (const auto& t : j["terms"]) {
      only_keys(t, "payoff.terms[]", {"weight", "payoff"});
      if (!t.contains("weight") || !t.contains("payoff")) {
        throw ConfigError("payoff.terms[]: needs weight and payoff");
      }
      terms.emplace_back(finite_number(t["weight"], "payoff.terms[].weight"), build_payoff(t["payoff"]));
    }
    g = Payoff::combination(terms);
  } else {
    throw ConfigError("payoff.kind: unknown '" + kind + "'");
  }
  if (j.contains("asset")) {
    if (!j["asset"].is_number_integer()) throw ConfigError("payoff.asset: expected an integer");
    g = g.on_asset(j["asset"].get<int>());
  }
  return g;
}

ProblemSpec build_problem(const RunConfig& cfg) {
  ModelDescriptor md = cfg.model;
  std::optional<Payoff> g;
  if (cfg.payoff) g = build_payoff(*cfg.payoff);
  // Continuous models are split at the payoff kinks unless breakpoints are
  // given. Tables are left alone: their derivative convention does not
  // follow the interpolant, so splitting buys nothing but atoms.
  const bool continuous = md.kind == ModelDescriptor::Kind::normal ||
                          md.kind == ModelDescriptor::Kind::shifted_lognormal ||
                          md.kind == ModelDescriptor::Kind::truncated_normal;
  if (g && continuous && md.breakpoints.empty() && !g->kinks().empty() && g->kind() != Payoff::Kind::table) {
    md.breakpoints = g->kinks();
    g = g->with_smoothing(0.0);
  }
  DiscreteMeasure P = make_model(md);
  const int d = P.dim();
  ActionSpace A = ActionSpace::whole(d);
  A.lower.setConstant(cfg.action_lower);
  A.upper.setConstant(cfg.action_upper);
  const WassersteinOrder order =
      std::isinf(cfg.wasserstein_p) ? WassersteinOrder::infinity() : WassersteinOrder::finite(cfg.wasserstein_p);
  return ProblemSpec(std::move(P), build_utility(cfg.utility), A, order, g);
}

void apply_parameter(RunConfig& cfg, const std::string& name, double v) {
  if (name == "a") cfg.model.a = v;
  else if (name == "mu") cfg.model.mu = v;
  else if (name == "sigma") cfg.model.sigma = v;
  else if (name == "radius") cfg.model.radius = v;
  else if (name == "nodes") cfg.model.nodes = static_cast<int>(std::lround(v));
  else if (name == "gamma") cfg.utility.gamma = v;
  else if (name == "kappa") cfg.utility.kappa = v;
  else if (name == "eta") cfg.utility.eta = v;
  else if (name == "w0") cfg.utility.w0 = v;
  else if (name == "p") {
    if (!(v > 1.0)) throw ConfigError("p: need p > 1");
    cfg.wasserstein_p = v;
  } else if (name == "delta") {
    check_deltas({v});
    cfg.deltas = {v};
  } else {
    throw ConfigError("unknown parameter '" + name + "'");
  }
}

}  // namespace robustfolio
