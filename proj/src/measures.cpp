// SPDX-License-Identifier: MIT
#include "robustfolio/measures.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "robustfolio/errors.hpp"
#include "robustfolio/lp.hpp"
#include "robustfolio/quadrature.hpp"

namespace robustfolio {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kContainTol = 1e-12;
constexpr int kExactLpCap = 12;

}  // namespace

// ---------------------------------------------------------------- StateSpace

StateSpace::StateSpace(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0) {
    throw ConfigError("StateSpace: bound vectors must be nonempty and of equal length");
  }
  for (int i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_(i)) || std::isnan(upper_(i)) || !(lower_(i) < upper_(i))) {
      throw ConfigError("StateSpace: need lower < upper in every coordinate");
    }
  }
}

StateSpace StateSpace::whole(int dim) {
  return StateSpace(Vec::Constant(dim, -kInf), Vec::Constant(dim, kInf));
}

StateSpace StateSpace::interval(double lo, double hi) {
  return StateSpace(Vec::Constant(1, lo), Vec::Constant(1, hi));
}

bool StateSpace::contains(const Vec& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (int i = 0; i < x.size(); ++i) {
    const double slack = tol * std::max(1.0, std::abs(x(i)));
    if (!(x(i) >= lower_(i) - slack && x(i) <= upper_(i) + slack)) return false;
  }
  return true;
}

Vec StateSpace::clip(const Vec& x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

double StateSpace::diameter() const {
  return (upper_ - lower_).norm();
}

// ---------------------------------------------------------- WassersteinOrder

WassersteinOrder WassersteinOrder::finite(double p) {
  if (!(p > 1.0)) throw ConfigError("Wasserstein order must satisfy p > 1");
  if (!std::isfinite(p)) return infinity();
  return {p, p / (p - 1.0)};
}

// ----------------------------------------------------------- DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(Mat points, Vec weights, StateSpace space, bool check_sum)
    : points_(std::move(points)), weights_(std::move(weights)), space_(std::move(space)) {
  if (points_.cols() == 0) throw ConfigError("DiscreteMeasure: need at least one atom");
  if (points_.cols() != weights_.size()) {
    throw ConfigError("DiscreteMeasure: point and weight counts differ");
  }
  if (points_.rows() != space_.dim()) {
    throw ConfigError("DiscreteMeasure: state space dimension differs from point dimension");
  }
  if (!points_.allFinite()) throw ConfigError("DiscreteMeasure: non-finite atom");
  double sum = 0.0;
  for (int i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_(i)) || weights_(i) < 0.0) {
      throw ConfigError("DiscreteMeasure: weights must be finite and nonnegative");
    }
    sum += weights_(i);
  }
  if (!(sum > 0.0)) throw ConfigError("DiscreteMeasure: total mass is zero");
  if (check_sum && std::abs(sum - 1.0) > kWeightTol) {
    std::ostringstream os;
    os.precision(17);
    os << "DiscreteMeasure: weights sum to " << sum << ", not 1";
    throw ConfigError(os.str());
  }
  weights_ /= sum;
  for (int i = 0; i < points_.cols(); ++i) {
    if (!space_.contains(points_.col(i), kContainTol)) {
      throw ConfigError("DiscreteMeasure: atom outside the state space");
    }
  }
}

DiscreteMeasure::DiscreteMeasure(Mat points, Vec weights, StateSpace space)
    : DiscreteMeasure(std::move(points), std::move(weights), std::move(space), true) {}

DiscreteMeasure::DiscreteMeasure(Mat points, Vec weights)
    : DiscreteMeasure(points, std::move(weights), StateSpace::whole(static_cast<int>(points.rows())),
                      true) {}

DiscreteMeasure::DiscreteMeasure()
    : DiscreteMeasure(Mat::Zero(1, 1), Vec::Ones(1), StateSpace::whole(1), true) {}

DiscreteMeasure DiscreteMeasure::normalized(Mat points, Vec weights, StateSpace space) {
  return DiscreteMeasure(std::move(points), std::move(weights), std::move(space), false);
}

DiscreteMeasure DiscreteMeasure::from_1d(const std::vector<double>& points,
                                         const std::vector<double>& weights, StateSpace space) {
  Mat pts(1, points.size());
  for (std::size_t i = 0; i < points.size(); ++i) pts(0, i) = points[i];
  Vec w = Eigen::Map<const Vec>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return DiscreteMeasure(std::move(pts), std::move(w), std::move(space));
}

DiscreteMeasure DiscreteMeasure::with_unbounded_support_flag(bool flag) const {
  DiscreteMeasure out = *this;
  out.unbounded_model_ = flag;
  return out;
}

DiscreteMeasure DiscreteMeasure::with_state_space(StateSpace space) const {
  DiscreteMeasure out(points_, weights_, std::move(space), false);
  out.unbounded_model_ = unbounded_model_;
  return out;
}

DiscreteMeasure DiscreteMeasure::with_weights(Vec weights) const {
  DiscreteMeasure out(points_, std::move(weights), space_, true);
  out.unbounded_model_ = unbounded_model_;
  return out;
}

double DiscreteMeasure::expect(const std::function<double(const Vec&)>& f) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += weights_(i) * f(points_.col(i));
  return s;
}

// -------------------------------------------------------------------- models

DiscreteMeasure binomial_model(double a) {
  ModelDescriptor d;
  d.kind = ModelDescriptor::Kind::binomial;
  d.a = a;
  return make_model(d);
}

DiscreteMeasure normal_model(double mu, double sigma, int nodes, std::vector<double> breakpoints) {
  ModelDescriptor d;
  d.kind = ModelDescriptor::Kind::normal;
  d.mu = mu;
  d.sigma = sigma;
  d.nodes = nodes;
  d.breakpoints = std::move(breakpoints);
  return make_model(d);
}

DiscreteMeasure shifted_lognormal_model(double mu, double sigma, int nodes, std::vector<double> breakpoints) {
  ModelDescriptor d;
  d.kind = ModelDescriptor::Kind::shifted_lognormal;
  d.mu = mu;
  d.sigma = sigma;
  d.nodes = nodes;
  d.breakpoints = std::move(breakpoints);
  return make_model(d);
}

DiscreteMeasure truncated_normal_model(double mu, double sigma, double radius, int nodes,
                                       std::vector<double> breakpoints) {
  ModelDescriptor d;
  d.kind = ModelDescriptor::Kind::truncated_normal;
  d.mu = mu;
  d.sigma = sigma;
  d.radius = radius;
  d.nodes = nodes;
  d.breakpoints = std::move(breakpoints);
  return make_model(d);
}

namespace {

// Gauss-Hermite atoms z_k with probability weights for N(0, 1); atoms
// whose weight underflows to zero are dropped.
void standard_normal_rule(int n, std::vector<double>& z, std::vector<double>& w) {
  const QuadratureRule r = gauss_hermite(n);
  for (int i = 0; i < n; ++i) {
    const double wi = r.weights[i] / std::sqrt(std::numbers::pi);
    if (wi > 0.0) {
      z.push_back(std::sqrt(2.0) * r.nodes[i]);
      w.push_back(wi);
    }
  }
}

/// Standard normal on [lo, hi] split at the breaks inside it, Gauss-Legendre
/// with n nodes per piece weighted by the density. Weights are unnormalized.
void piecewise_normal_rule(int n, double lo, double hi, std::vector<double> breaks, std::vector<double>& z,
                           std::vector<double>& w) {
  std::vector<double> cuts = {lo};
  std::sort(breaks.begin(), breaks.end());
  for (double b : breaks) {
    if (b > cuts.back() + 1e-12 && b < hi - 1e-12) cuts.push_back(b);
  }
  cuts.push_back(hi);
  const QuadratureRule r = gauss_legendre(n);
  z.clear();
  w.clear();
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double c = 0.5 * (cuts[k] + cuts[k + 1]), h = 0.5 * (cuts[k + 1] - cuts[k]);
    for (int i = 0; i < n; ++i) {
      const double x = c + h * r.nodes[i];
      z.push_back(x);
      w.push_back(h * r.weights[i] * std::exp(-0.5 * x * x));
    }
  }
}

constexpr double kNormalTruncation = 12.0;  // in standard deviations; lost mass ~4e-33

Mat row_matrix(const std::vector<double>& v) {
  Mat m(1, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
  return m;
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Split rule on +-kNormalTruncation when a breakpoint falls strictly
/// inside the window, Gauss-Hermite otherwise.
void split_or_hermite_rule(int n, std::vector<double> bz, std::vector<double>& z, std::vector<double>& w) {
  bz.erase(std::remove_if(bz.begin(), bz.end(),
                          [](double b) { return !(std::abs(b) < kNormalTruncation); }),
           bz.end());
  if (bz.empty()) {
    standard_normal_rule(n, z, w);
  } else {
    piecewise_normal_rule(n, -kNormalTruncation, kNormalTruncation, bz, z, w);
  }
}

}  // namespace

DiscreteMeasure make_model(const ModelDescriptor& desc) {
  using Kind = ModelDescriptor::Kind;
  auto need_sigma = [&] {
    if (!(desc.sigma > 0.0) || !std::isfinite(desc.sigma) || !std::isfinite(desc.mu)) {
      throw ConfigError("model: need finite mu and sigma > 0");
    }
    if (desc.nodes < 2) throw ConfigError("model: need at least 2 quadrature nodes");
  };
  switch (desc.kind) {
    case Kind::binomial: {
      if (!(desc.a > 0.0 && desc.a < 1.0)) throw ConfigError("binomial: need a in (0, 1)");
      StateSpace s = desc.has_state_space ? desc.state_space
                                          : StateSpace::interval(-1.0 - desc.a, 1.0 + desc.a);
      return DiscreteMeasure::from_1d({-1.0, 1.0}, {desc.a, 1.0 - desc.a}, s);
    }
    case Kind::normal: {
      need_sigma();
      std::vector<double> bz, z, w;
      for (double b : desc.breakpoints) bz.push_back((b - desc.mu) / desc.sigma);
      split_or_hermite_rule(desc.nodes, bz, z, w);
      for (double& x : z) x = desc.mu + desc.sigma * x;
      StateSpace s = desc.has_state_space ? desc.state_space : StateSpace::whole(1);
      return DiscreteMeasure::normalized(row_matrix(z), to_vec(w), s)
          .with_unbounded_support_flag(true);
    }
    case Kind::shifted_lognormal: {
      need_sigma();
      std::vector<double> bz, z, w;
      for (double b : desc.breakpoints) {
        if (b > -1.0) bz.push_back((std::log1p(b) - desc.mu) / desc.sigma);
      }
      split_or_hermite_rule(desc.nodes, bz, z, w);
      for (double& x : z) x = std::expm1(desc.mu + desc.sigma * x);
      StateSpace s = desc.has_state_space ? desc.state_space : StateSpace::interval(-1.0, kInf);
      return DiscreteMeasure::normalized(row_matrix(z), to_vec(w), s)
          .with_unbounded_support_flag(true);
    }
    case Kind::truncated_normal: {
      need_sigma();
      if (!(desc.radius > 0.0) || !std::isfinite(desc.radius)) {
        throw ConfigError("truncated_normal: need a finite radius > 0");
      }
      std::vector<double> bz, x, w;
      for (double b : desc.breakpoints) bz.push_back((b - desc.mu) / desc.sigma);
      const double zr = desc.radius / desc.sigma;
      piecewise_normal_rule(desc.nodes, -zr, zr, bz, x, w);
      for (double& v : x) v = desc.mu + desc.sigma * v;
      StateSpace s = desc.has_state_space
                         ? desc.state_space
                         : StateSpace::interval(desc.mu - desc.radius, desc.mu + desc.radius);
      return DiscreteMeasure::normalized(row_matrix(x), to_vec(w), s);
    }
    case Kind::explicit_points: {
      StateSpace s = desc.has_state_space ? desc.state_space
                                          : StateSpace::whole(static_cast<int>(desc.points.rows()));
      return DiscreteMeasure(desc.points, desc.weights, s);
    }
  }
  throw ConfigError("model: unknown kind");
}

// --------------------------------------------------------------- Wasserstein

namespace {

double wasserstein_1d(const DiscreteMeasure& P, const DiscreteMeasure& Q,
                      const WassersteinOrder& order) {
  auto sorted = [](const DiscreteMeasure& M, std::vector<double>& x, std::vector<double>& cdf) {
    std::vector<int> idx(M.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return M.points()(0, a) < M.points()(0, b); });
    double c = 0.0;
    for (int i : idx) {
      if (M.weight(i) <= 0.0) continue;
      x.push_back(M.points()(0, i));
      c += M.weight(i);
      cdf.push_back(c);
    }
    cdf.back() = 1.0;
  };
  std::vector<double> xp, cp, xq, cq;
  sorted(P, xp, cp);
  sorted(Q, xq, cq);
  std::vector<double> levels;
  levels.reserve(cp.size() + cq.size() + 1);
  levels.push_back(0.0);
  levels.insert(levels.end(), cp.begin(), cp.end());
  levels.insert(levels.end(), cq.begin(), cq.end());
  std::sort(levels.begin(), levels.end());
  double total = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const double dm = levels[k + 1] - levels[k];
    if (dm <= 0.0) continue;
    const double mid = 0.5 * (levels[k] + levels[k + 1]);
    const auto ip = std::min<std::size_t>(
        std::upper_bound(cp.begin(), cp.end(), mid) - cp.begin(), xp.size() - 1);
    const auto iq = std::min<std::size_t>(
        std::upper_bound(cq.begin(), cq.end(), mid) - cq.begin(), xq.size() - 1);
    const double gap = std::abs(xp[ip] - xq[iq]);
    if (order.is_inf()) {
      // Slivers of rounding-level mass are not part of either support.
      if (dm > 1e-13) worst = std::max(worst, gap);
    } else {
      total += dm * std::pow(gap, order.p);
    }
  }
  return order.is_inf() ? worst : std::pow(total, 1.0 / order.p);
}

// Transport LP over the allowed edges; returns feasibility and optionally
// the minimal cost.
LpResult transport_lp(const DiscreteMeasure& P, const DiscreteMeasure& Q, const Mat& cost,
                      const std::vector<std::pair<int, int>>& edges) {
  const int n = P.size(), m = Q.size();
  const int nv = static_cast<int>(edges.size());
  Mat A = Mat::Zero(n + m, nv);
  Vec b(n + m);
  Vec c(nv);
  for (int e = 0; e < nv; ++e) {
    A(edges[e].first, e) = 1.0;
    A(n + edges[e].second, e) = 1.0;
    c(e) = cost(edges[e].first, edges[e].second);
  }
  b.head(n) = P.weights();
  b.tail(m) = Q.weights();
  return solve_lp(c, A, b);
}

double wasserstein_lp(const DiscreteMeasure& P, const DiscreteMeasure& Q,
                      const WassersteinOrder& order) {
  if (P.size() > kExactLpCap || Q.size() > kExactLpCap) {
    throw ConfigError("wasserstein_distance: d > 1 exact solve is capped at 12 x 12 atoms");
  }
  const int n = P.size(), m = Q.size();
  Mat dist(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) dist(i, j) = (P.point(i) - Q.point(j)).norm();
  if (!order.is_inf()) {
    Mat cost = dist.array().pow(order.p).matrix();
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) edges.emplace_back(i, j);
    const LpResult r = transport_lp(P, Q, cost, edges);
    if (r.status != LpResult::Status::optimal) {
      throw NumericalError("wasserstein_distance: transport LP failed");
    }
    return std::pow(std::max(r.objective, 0.0), 1.0 / order.p);
  }
  // Bottleneck: smallest threshold whose edge set admits a coupling.
  std::vector<double> levels(dist.data(), dist.data() + dist.size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const Mat zero = Mat::Zero(n, m);
  auto feasible = [&](double thr) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        if (dist(i, j) <= thr) edges.emplace_back(i, j);
    return transport_lp(P, Q, zero, edges).status == LpResult::Status::optimal;
  };
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return levels[lo];
}

}  // namespace

double wasserstein_distance(const DiscreteMeasure& P, const DiscreteMeasure& Q,
                            const WassersteinOrder& order) {
  if (P.dim() != Q.dim()) throw ConfigError("wasserstein_distance: dimension mismatch");
  if (P.dim() == 1) return wasserstein_1d(P, Q, order);
  return wasserstein_lp(P, Q, order);
}

// ---------------------------------------------------------------- pushforward

DiscreteMeasure pushforward(const DiscreteMeasure& P, const std::function<Vec(const Vec&)>& map,
                            ClipMode mode) {
  Mat pts(P.dim(), P.size());
  for (int i = 0; i < P.size(); ++i) {
    Vec y = map(P.point(i));
    if (y.size() != P.dim()) throw ConfigError("pushforward: map changes the dimension");
    if (!P.state_space().contains(y, kContainTol)) {
      if (mode == ClipMode::error) {
        throw AssumptionError("pushforward: image leaves the state space");
      }
      y = P.state_space().clip(y);
    }
    pts.col(i) = P.state_space().clip(y);
  }
  return DiscreteMeasure::normalized(std::move(pts), P.weights(), P.state_space())
      .with_unbounded_support_flag(P.unbounded_support_model());
}

DiscreteMeasure translate(const DiscreteMeasure& P, const Vec& shift, ClipMode mode) {
  return pushforward(P, [&](const Vec& x) -> Vec { return x + shift; }, mode);
}

// ------------------------------------------------------------------- moments

double Moments::sharpe() const {
  if (mean.size() != 1) throw ConfigError("sharpe: only defined for d = 1");
  const double var = covariance(0, 0);
  if (!(var > 0.0)) throw AssumptionError("sharpe: zero variance");
  return mean(0) / std::sqrt(var);
}

Moments moments(const DiscreteMeasure& P) {
  Moments m;
  m.mean = P.points() * P.weights();
  const Mat centred = P.points().colwise() - m.mean;
  m.covariance = centred * P.weights().asDiagonal() * centred.transpose();
  return m;
}

// ------------------------------------------------------------- no arbitrage

bool no_arbitrage_check(const DiscreteMeasure& P) {
  std::vector<int> support;
  for (int i = 0; i < P.size(); ++i)
    if (P.weight(i) > 0.0) support.push_back(i);
  if (P.dim() == 1) {
    bool pos = false, neg = false;
    for (int i : support) {
      pos = pos || P.points()(0, i) > 0.0;
      neg = neg || P.points()(0, i) < 0.0;
    }
    return pos && neg;
  }
  const int d = P.dim();
  const int n = static_cast<int>(support.size());
  Mat X(d, n);
  for (int k = 0; k < n; ++k) X.col(k) = P.point(support[k]);
  Eigen::FullPivLU<Mat> lu(X);
  lu.setThreshold(1e-12);
  if (lu.rank() < d) return false;
  // Variables (t, mu_1..mu_n) >= 0 with lambda_i = t + mu_i:
  // sum lambda_i x_i = 0, sum lambda_i = 1, maximize t.
  Mat A = Mat::Zero(d + 1, n + 1);
  A.block(0, 0, d, 1) = X.rowwise().sum();
  A.block(0, 1, d, n) = X;
  A(d, 0) = n;
  A.block(d, 1, 1, n).setOnes();
  Vec b = Vec::Zero(d + 1);
  b(d) = 1.0;
  Vec c = Vec::Zero(n + 1);
  c(0) = -1.0;
  const LpResult r = solve_lp(c, A, b);
  return r.status == LpResult::Status::optimal && r.x(0) > 1e-12;
}

}  // namespace robustfolio
