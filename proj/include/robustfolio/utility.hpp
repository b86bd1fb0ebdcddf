// SPDX-License-Identifier: MIT
/**
 * @file utility.hpp
 * @brief Utility catalog with first and second derivatives and domains.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace robustfolio {

/// Strictly increasing concave utility on an open interval D = (lower, inf).
///
/// - log_shifted(w0):   u(x) = ln(x + w0) on (-w0, inf)
/// - exponential(g):    u(x) = -exp(-g x) on R
/// - power(eta, w0):    u(x) = ((x + w0)^(1 - eta) - 1) / (1 - eta), eta > 0, eta != 1
/// - capped_exponential(g, k): exponential for x >= -1/k, continued linearly
///   below -1/k with slope g exp(g/k); C1 but not C2 at -1/k.
class Utility {
 public:
  enum class Kind { log_shifted, exponential, power, capped_exponential };

  struct Bundle {
    double u;
    double du;
    double d2u;
    double risk_aversion;  // -u''/u'
  };

  static Utility log_shifted(double w0 = 1.0);
  static Utility exponential(double gamma);
  static Utility power(double eta, double w0 = 1.0);
  static Utility capped_exponential(double gamma, double kappa);

  Kind kind() const { return kind_; }
  double w0() const { return w0_; }
  double gamma() const { return gamma_; }
  double eta() const { return eta_; }
  double kappa() const { return kappa_; }

  /// Lower end of D (-inf for the exponential family); D is open.
  double domain_lower() const;
  bool in_domain(double x) const { return x > domain_lower(); }

  /// Unchecked evaluators; outside D they return -inf / inf / nan.
  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  /// Checked evaluation; throws AssumptionError outside D.
  Bundle evaluate(double x) const;

  /// Location of the C2 break (capped_exponential only).
  std::optional<double> kink() const;

  std::string describe() const;

 private:
  Utility(Kind kind, double w0, double gamma, double eta, double kappa)
      : kind_(kind), w0_(w0), gamma_(gamma), eta_(eta), kappa_(kappa) {}
  Kind kind_;
  double w0_ = 0.0;
  double gamma_ = 0.0;
  double eta_ = 0.0;
  double kappa_ = 0.0;
};

struct FiniteDifferenceReport {
  /// Max relative error of u' against (u(x+h) - u(x-h)) / 2h, smooth points.
  double max_rel_error_du = 0.0;
  /// Same for u'' against the central difference of u'.
  double max_rel_error_d2u = 0.0;
  double max_rel_error() const { return max_rel_error_du > max_rel_error_d2u ? max_rel_error_du : max_rel_error_d2u; }
  /// Grid points whose stencil straddles a kink; excluded from the maxima.
  std::vector<double> kink_points;
  /// Max relative error at the kink points (u'' there is expected to be off).
  double kink_max_rel_error = 0.0;
};

/// Compares analytic derivatives with central differences of step h.
/// Every grid point needs a margin of at least h inside D.
FiniteDifferenceReport finite_difference_check(const Utility& u, const std::vector<double>& grid,
                                               double h);

}  // namespace robustfolio
