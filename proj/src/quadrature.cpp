// SPDX-License-Identifier: MIT
#include "robustfolio/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "robustfolio/errors.hpp"

namespace robustfolio {

namespace {

// Orthonormal Hermite recurrence at z. Returns (h_n(z), h_n'(z)).
std::pair<double, double> hermite_orthonormal(int n, double z) {
  double p1 = 1.0 / std::pow(std::numbers::pi, 0.25);
  double p2 = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
  }
  return {p1, std::sqrt(2.0 * n) * p2};
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
  if (n < 1 || n > 400) {
    throw ConfigError("gauss_hermite: order must be in [1, 400]");
  }
  // Golub-Welsch eigenvalues give starting points; Newton on the
  // orthonormal recurrence then fixes nodes and weights to full relative
  // precision, including the tiny tail weights.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = es.eigenvalues()(i);
    double dp = 0.0;
    for (int it = 0; it < 20; ++it) {
      auto [p, d] = hermite_orthonormal(n, z);
      dp = d;
      const double step = p / d;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    dp = hermite_orthonormal(n, z).second;
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / (dp * dp);
  }
  // Symmetrize to remove the last-bit asymmetry from the eigen solver.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double z = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -z;
    rule.nodes[j] = z;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return rule;
}

}  // namespace robustfolio
