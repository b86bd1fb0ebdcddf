// SPDX-License-Identifier: MIT
/**
 * @file payoff.hpp
 * @brief Option payoffs g(X) on one coordinate of the price increment, with
 * quadratic rounding of kinks.
 */
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "robustfolio/measures.hpp"

namespace robustfolio {

inline constexpr double kDefaultSmoothing = 1e-4;

/// Scalar payoff of coordinate `asset` of X. Kinked payoffs replace x^+ by
/// (x + s)^2 / (4 s) on [-s, s]; with s = 0 the derivative at a kink is the
/// midpoint of the one-sided slopes.
class Payoff {
 public:
  enum class Kind { power, call, butterfly, abs_shift, constant, table, combination };

  static Payoff power(int k);
  static Payoff call(double strike, double smoothing = kDefaultSmoothing);
  /// (x + K)^+ - 2 x^+ + (x - K)^+
  static Payoff butterfly(double K, double smoothing = kDefaultSmoothing);
  /// |x + x0|
  static Payoff abs_shift(double x0, double smoothing = kDefaultSmoothing);
  static Payoff constant(double c);
  /// Piecewise-linear interpolation of (x, y), extrapolated linearly.
  /// Derivatives are central differences on the table grid, interpolated.
  static Payoff table(std::vector<double> x, std::vector<double> y);
  static Payoff combination(const std::vector<std::pair<double, Payoff>>& terms);

  Kind kind() const { return kind_; }
  int asset() const { return asset_; }
  double smoothing() const { return smoothing_; }

  Payoff on_asset(int asset) const;
  Payoff with_smoothing(double s) const;
  /// Turns smoothing off when no atom of P lies within s of a kink.
  Payoff prepared_for(const DiscreteMeasure& P) const;

  double value(double x) const;
  double derivative(double x) const;
  double value(const Vec& x) const { return value(x(asset_)); }
  /// Gradient in R^dim (nonzero only in the asset coordinate).
  Vec gradient(const Vec& x) const;

  /// Kink locations of the unsmoothed payoff.
  std::vector<double> kinks() const;

  std::string describe() const;

 private:
  Payoff() = default;
  Kind kind_ = Kind::constant;
  int asset_ = 0;
  double param_ = 0.0;
  double smoothing_ = 0.0;
  std::vector<double> tx_, ty_, tdy_;
  std::vector<std::pair<double, std::shared_ptr<const Payoff>>> terms_;
};

}  // namespace robustfolio
