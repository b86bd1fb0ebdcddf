// SPDX-License-Identifier: MIT
/**
 * @file quadrature.hpp
 * @brief Gauss-Hermite and Gauss-Legendre rules of arbitrary order.
 */
#pragma once

#include <vector>

namespace robustfolio {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2); weights sum to sqrt(pi).
/// Supports 1 <= n <= 400 (the recurrence overflows beyond that).
QuadratureRule gauss_hermite(int n);

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
QuadratureRule gauss_legendre(int n);

}  // namespace robustfolio
