// SPDX-License-Identifier: MIT
/**
 * @file optimize.hpp
 * @brief One-dimensional global minimization and monotone root finding.
 */
#pragma once

#include <functional>
#include <vector>

namespace robustfolio {

struct ScalarMin {
  double x = 0.0;
  double f = 0.0;
};

/// Global minimum of f over the sorted candidate grid, refined locally
/// around the best grid point. If df is given, a sign change of df next to
/// the best point is solved to full precision; otherwise Brent's method is
/// used. The returned value is never worse than the best grid value.
ScalarMin minimize_scanned(const std::function<double(double)>& f,
                           const std::function<double(double)>& df,
                           const std::vector<double>& grid);

/// As above with f already evaluated on the grid.
ScalarMin minimize_scanned(const std::function<double(double)>& f,
                           const std::function<double(double)>& df,
                           const std::vector<double>& grid, const std::vector<double>& values);

/// Root of a nonincreasing function on [lo, hi] where g(lo) >= 0 >= g(hi).
double bisect_nonincreasing(const std::function<double(double)>& g, double lo, double hi,
                            double xtol = 0.0, int max_iter = 200);

/// Maximum of a concave (unimodal) function on [lo, hi] by golden section.
ScalarMin golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             double xtol);

}  // namespace robustfolio
