// SPDX-License-Identifier: MIT
/**
 * @file measures.hpp
 * @brief Finitely supported probability measures on a box state space,
 * quadrature discretizations of the analytic models, and exact
 * Wasserstein distances between small discrete measures.
 */
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace robustfolio {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed convex box in R^d; bounds may be infinite.
class StateSpace {
 public:
  StateSpace(Vec lower, Vec upper);

  static StateSpace whole(int dim);
  static StateSpace interval(double lo, double hi);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

  bool contains(const Vec& x, double tol = 0.0) const;
  Vec clip(const Vec& x) const;
  /// Euclidean diameter; infinite if any coordinate is unbounded.
  double diameter() const;
  bool bounded() const { return std::isfinite(diameter()); }

 private:
  Vec lower_, upper_;
};

/// Wasserstein order p in (1, inf] and its conjugate q (q = 1 for p = inf).
struct WassersteinOrder {
  double p = kInf;
  double q = 1.0;

  static WassersteinOrder finite(double p);
  static WassersteinOrder infinity() { return {}; }
  bool is_inf() const { return !std::isfinite(p); }
};

/// Immutable discrete probability measure. Points are stored column-wise
/// (d x n). Weights are validated (nonnegative, sum within 1e-12 of one)
/// and renormalized.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Mat points, Vec weights, StateSpace space);
  DiscreteMeasure(Mat points, Vec weights);
  /// Point mass at the origin of R.
  DiscreteMeasure();

  /// Skips the 1e-12 sum check before renormalizing; for quadrature rules
  /// whose weights carry rounding error of their own.
  static DiscreteMeasure normalized(Mat points, Vec weights, StateSpace space);

  static DiscreteMeasure from_1d(const std::vector<double>& points,
                                 const std::vector<double>& weights,
                                 StateSpace space = StateSpace::whole(1));

  int dim() const { return static_cast<int>(points_.rows()); }
  int size() const { return static_cast<int>(points_.cols()); }
  const Mat& points() const { return points_; }
  const Vec& weights() const { return weights_; }
  Vec point(int i) const { return points_.col(i); }
  double weight(int i) const { return weights_(i); }
  const StateSpace& state_space() const { return space_; }

  /// Set for discretizations of models with unbounded support (normal,
  /// lognormal); the growth guard and the KL comparator consult it.
  bool unbounded_support_model() const { return unbounded_model_; }
  DiscreteMeasure with_unbounded_support_flag(bool flag) const;

  DiscreteMeasure with_state_space(StateSpace space) const;
  DiscreteMeasure with_weights(Vec weights) const;

  /// Sum of w_i f(x_i).
  double expect(const std::function<double(const Vec&)>& f) const;

 private:
  DiscreteMeasure(Mat points, Vec weights, StateSpace space, bool check_sum);
  Mat points_;
  Vec weights_;
  StateSpace space_;
  bool unbounded_model_ = false;
};

/// Model descriptor accepted by make_model.
struct ModelDescriptor {
  enum class Kind { binomial, normal, shifted_lognormal, truncated_normal, explicit_points };
  Kind kind = Kind::binomial;
  double a = 0.25;         // binomial
  double mu = 0.0;         // normal, shifted_lognormal, truncated_normal
  double sigma = 1.0;      // normal, shifted_lognormal, truncated_normal
  double radius = 0.0;     // truncated_normal: support [mu - radius, mu + radius]
  int nodes = 128;         // quadrature order (per piece when breakpoints are given)
  std::vector<double> breakpoints;  // normal, shifted_lognormal, truncated_normal
  Mat points;              // explicit
  Vec weights;             // explicit
  bool has_state_space = false;
  StateSpace state_space = StateSpace::whole(1);
};

/// binomial(a): atoms {-1, 1} with weights {a, 1 - a}, a in (0, 1); the
/// default state space is [-1 - a, 1 + a].
/// normal / shifted_lognormal: Gauss-Hermite discretization (X = e^Z - 1
/// for the lognormal, state space [-1, inf)).
/// truncated_normal: Gauss-Legendre nodes on [mu - R, mu + R] weighted by
/// the normal density; state space [mu - R, mu + R].
/// Breakpoints (in X units) switch normal and shifted_lognormal to the same
/// piecewise Gauss-Legendre rule on mu +- 12 sigma (in Z units), split at the
/// breakpoints, so that expectations of functions with kinks there stay
/// spectrally accurate. Breakpoints outside that window are dropped; with
/// none left the Gauss-Hermite rule is used.
DiscreteMeasure make_model(const ModelDescriptor& desc);

DiscreteMeasure binomial_model(double a);
DiscreteMeasure normal_model(double mu, double sigma, int nodes = 128, std::vector<double> breakpoints = {});
DiscreteMeasure shifted_lognormal_model(double mu, double sigma, int nodes = 128,
                                        std::vector<double> breakpoints = {});
DiscreteMeasure truncated_normal_model(double mu, double sigma, double radius, int nodes = 16,
                                       std::vector<double> breakpoints = {});

/// W_p(P, Q). Exact quantile coupling in d = 1; linear program (p finite)
/// or bottleneck search (p = inf) for d > 1 with at most 12 atoms each.
double wasserstein_distance(const DiscreteMeasure& P, const DiscreteMeasure& Q,
                            const WassersteinOrder& order);

enum class ClipMode { error, clip };

/// Image measure under a point map; weights are unchanged. Images outside
/// the state space raise unless ClipMode::clip is requested.
DiscreteMeasure pushforward(const DiscreteMeasure& P, const std::function<Vec(const Vec&)>& map,
                            ClipMode mode = ClipMode::error);

/// Translation x -> x + shift.
DiscreteMeasure translate(const DiscreteMeasure& P, const Vec& shift,
                          ClipMode mode = ClipMode::error);

struct Moments {
  Vec mean;
  Mat covariance;
  /// mean / standard deviation in d = 1; throws on zero variance or d > 1.
  double sharpe() const;
};

Moments moments(const DiscreteMeasure& P);

/// True iff every nonzero strategy loses with positive probability and
/// gains with positive probability, i.e. 0 is interior to the convex hull
/// of the support.
bool no_arbitrage_check(const DiscreteMeasure& P);

}  // namespace robustfolio
