// SPDX-License-Identifier: MIT
#include "robustfolio/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "robustfolio/errors.hpp"

namespace robustfolio {

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("utility: ") + what + " must be finite and > 0");
  }
}
}  // namespace

Utility Utility::log_shifted(double w0) {
  require_positive(w0, "w0");
  return Utility(Kind::log_shifted, w0, 0.0, 1.0, 0.0);
}

Utility Utility::exponential(double gamma) {
  require_positive(gamma, "gamma");
  return Utility(Kind::exponential, 0.0, gamma, 0.0, 0.0);
}

Utility Utility::power(double eta, double w0) {
  require_positive(eta, "eta");
  require_positive(w0, "w0");
  if (eta == 1.0) throw ConfigError("utility: power needs eta != 1 (use log_shifted)");
  return Utility(Kind::power, w0, 0.0, eta, 0.0);
}

Utility Utility::capped_exponential(double gamma, double kappa) {
  require_positive(gamma, "gamma");
  require_positive(kappa, "kappa");
  return Utility(Kind::capped_exponential, 0.0, gamma, 0.0, kappa);
}

double Utility::domain_lower() const {
  switch (kind_) {
    case Kind::log_shifted:
    case Kind::power:
      return -w0_;
    default:
      return -kInfinity;
  }
}

double Utility::value(double x) const {
  switch (kind_) {
    case Kind::log_shifted:
      return x > -w0_ ? std::log(x + w0_) : -kInfinity;
    case Kind::exponential:
      return -std::exp(-gamma_ * x);
    case Kind::power: {
      if (!(x > -w0_)) return eta_ > 1.0 ? -kInfinity : -1.0 / (1.0 - eta_);
      return std::expm1((1.0 - eta_) * std::log(x + w0_)) / (1.0 - eta_);
    }
    case Kind::capped_exponential: {
      const double b = -1.0 / kappa_;
      if (x >= b) return -std::exp(-gamma_ * x);
      const double e = std::exp(gamma_ / kappa_);
      return -e + gamma_ * e * (x - b);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Utility::d1(double x) const {
  switch (kind_) {
    case Kind::log_shifted:
      return x > -w0_ ? 1.0 / (x + w0_) : kInfinity;
    case Kind::exponential:
      return gamma_ * std::exp(-gamma_ * x);
    case Kind::power:
      return x > -w0_ ? std::pow(x + w0_, -eta_) : kInfinity;
    case Kind::capped_exponential:
      return x >= -1.0 / kappa_ ? gamma_ * std::exp(-gamma_ * x)
                                : gamma_ * std::exp(gamma_ / kappa_);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Utility::d2(double x) const {
  switch (kind_) {
    case Kind::log_shifted:
      return x > -w0_ ? -1.0 / ((x + w0_) * (x + w0_)) : -kInfinity;
    case Kind::exponential:
      return -gamma_ * gamma_ * std::exp(-gamma_ * x);
    case Kind::power:
      return x > -w0_ ? -eta_ * std::pow(x + w0_, -eta_ - 1.0) : -kInfinity;
    case Kind::capped_exponential:
      // One-sided: zero on the linear branch, including the kink itself
      // from the left; the right limit is used at x = -1/kappa.
      return x >= -1.0 / kappa_ ? -gamma_ * gamma_ * std::exp(-gamma_ * x) : 0.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Utility::Bundle Utility::evaluate(double x) const {
  if (!in_domain(x) || !std::isfinite(x)) {
    std::ostringstream os;
    os.precision(17);
    os << "utility: x = " << x << " outside the domain of " << describe();
    throw AssumptionError(os.str());
  }
  Bundle b{value(x), d1(x), d2(x), 0.0};
  b.risk_aversion = -b.d2u / b.du;
  return b;
}

std::optional<double> Utility::kink() const {
  if (kind_ == Kind::capped_exponential) return -1.0 / kappa_;
  return std::nullopt;
}

std::string Utility::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::log_shifted:
      os << "log_shifted(w0=" << w0_ << ")";
      break;
    case Kind::exponential:
      os << "exponential(gamma=" << gamma_ << ")";
      break;
    case Kind::power:
      os << "power(eta=" << eta_ << ", w0=" << w0_ << ")";
      break;
    case Kind::capped_exponential:
      os << "capped_exponential(gamma=" << gamma_ << ", kappa=" << kappa_ << ")";
      break;
  }
  return os.str();
}

FiniteDifferenceReport finite_difference_check(const Utility& u, const std::vector<double>& grid,
                                               double h) {
  if (!(h > 0.0)) throw ConfigError("finite_difference_check: need h > 0");
  FiniteDifferenceReport rep;
  auto rel = [](double approx, double exact) {
    return std::abs(approx - exact) / std::max(std::abs(exact), 1e-300);
  };
  for (double x : grid) {
    if (!u.in_domain(x - h)) {
      throw ConfigError("finite_difference_check: grid point closer than h to the domain edge");
    }
    const double e1 = rel((u.value(x + h) - u.value(x - h)) / (2.0 * h), u.d1(x));
    const double e2 = rel((u.d1(x + h) - u.d1(x - h)) / (2.0 * h), u.d2(x));
    const auto k = u.kink();
    if (k && std::abs(x - *k) <= h) {
      rep.kink_points.push_back(x);
      rep.kink_max_rel_error = std::max({rep.kink_max_rel_error, e1, e2});
      continue;
    }
    rep.max_rel_error_du = std::max(rep.max_rel_error_du, e1);
    rep.max_rel_error_d2u = std::max(rep.max_rel_error_d2u, e2);
  }
  return rep;
}

}  // namespace robustfolio
