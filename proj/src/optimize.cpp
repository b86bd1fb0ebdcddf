// SPDX-License-Identifier: MIT
#include "robustfolio/optimize.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

namespace robustfolio {

namespace {

void refine(const std::function<double(double)>& f, const std::function<double(double)>& df,
            double a, double b, ScalarMin& best) {
  if (!(b > a)) return;
  auto consider = [&](double x) {
    const double v = f(x);
    if (v < best.f) best = {x, v};
  };
  if (df) {
    const double da = df(a), db = df(b);
    if (std::isfinite(da) && std::isfinite(db) && da < 0.0 && db > 0.0) {
      std::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
      try {
        auto r = boost::math::tools::toms748_solve(df, a, b, da, db, tol, iters);
        consider(0.5 * (r.first + r.second));
        consider(r.first);
        consider(r.second);
        return;
      } catch (const std::exception&) {
        // fall through to Brent
      }
    }
  }
  std::uintmax_t iters = 500;
  auto r = boost::math::tools::brent_find_minima(f, a, b, std::numeric_limits<double>::digits,
                                                 iters);
  consider(r.first);
}

}  // namespace

ScalarMin minimize_scanned(const std::function<double(double)>& f,
                           const std::function<double(double)>& df,
                           const std::vector<double>& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid[i]);
  return minimize_scanned(f, df, grid, values);
}

ScalarMin minimize_scanned(const std::function<double(double)>& f,
                           const std::function<double(double)>& df,
                           const std::vector<double>& grid, const std::vector<double>& values) {
  ScalarMin best{grid.front(), std::numeric_limits<double>::infinity()};
  std::size_t k = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = values[i];
    if (v < best.f) {
      best = {grid[i], v};
      k = i;
    }
  }
  if (!std::isfinite(best.f)) return best;
  if (k > 0) refine(f, df, grid[k - 1], grid[k], best);
  if (k + 1 < grid.size()) refine(f, df, grid[k], grid[k + 1], best);
  return best;
}

double bisect_nonincreasing(const std::function<double(double)>& g, double lo, double hi,
                            double xtol, int max_iter) {
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= xtol) break;
    if (g(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ScalarMin golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             double xtol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  ScalarMin best = fc >= fd ? ScalarMin{c, fc} : ScalarMin{d, fd};
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v > best.f) best = {x, v};
  }
  return best;
}

}  // namespace robustfolio
