// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "robustfolio/errors.hpp"
#include "robustfolio/lp.hpp"
#include "robustfolio/measures.hpp"
#include "robustfolio/quadrature.hpp"

using namespace robustfolio;

namespace {

DiscreteMeasure point_mass(double c) { return DiscreteMeasure::from_1d({c}, {1.0}); }

DiscreteMeasure random_measure(std::mt19937& rng, int n, int dim = 1) {
  std::uniform_real_distribution<double> x(-2.0, 2.0), w(0.05, 1.0);
  Mat pts(dim, n);
  Vec wts(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) pts(k, i) = x(rng);
    wts(i) = w(rng);
  }
  return DiscreteMeasure::normalized(pts, wts, StateSpace::whole(dim));
}

}  // namespace

TEST(Quadrature, HermiteIntegratesPolynomialsExactly) {
  for (int n : {2, 8, 64, 128, 256}) {
    const QuadratureRule r = gauss_hermite(n);
    double m0 = 0, m2 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = r.nodes[i], w = r.weights[i];
      m0 += w;
      m2 += w * x * x;
      m4 += w * x * x * x * x;
    }
    const double sp = std::sqrt(M_PI);
    EXPECT_NEAR(m0, sp, 1e-14) << n;
    EXPECT_NEAR(m2, sp / 2.0, 1e-13) << n;
    if (n >= 3) EXPECT_NEAR(m4, 3.0 * sp / 4.0, 1e-13) << n;
  }
  EXPECT_THROW(gauss_hermite(0), ConfigError);
  EXPECT_THROW(gauss_hermite(401), ConfigError);
}

TEST(Quadrature, LegendreIntegratesPolynomialsExactly) {
  const QuadratureRule r = gauss_legendre(10);
  double s = 0, s8 = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    s += r.weights[i];
    s8 += r.weights[i] * std::pow(r.nodes[i], 8);
  }
  EXPECT_NEAR(s, 2.0, 1e-14);
  EXPECT_NEAR(s8, 2.0 / 9.0, 1e-14);
}

TEST(StateSpace, BoxBasics) {
  const StateSpace s = StateSpace::interval(-1.0, 2.0);
  EXPECT_TRUE(s.contains(Vec::Constant(1, 2.0)));
  EXPECT_FALSE(s.contains(Vec::Constant(1, 2.1)));
  EXPECT_TRUE(s.contains(Vec::Constant(1, 2.1), 0.2));
  EXPECT_DOUBLE_EQ(s.clip(Vec::Constant(1, -5.0))(0), -1.0);
  EXPECT_DOUBLE_EQ(s.diameter(), 3.0);
  EXPECT_FALSE(StateSpace::whole(2).bounded());
  EXPECT_THROW(StateSpace::interval(1.0, 1.0), ConfigError);
}

TEST(WassersteinOrder, Conjugate) {
  EXPECT_DOUBLE_EQ(WassersteinOrder::finite(2.0).q, 2.0);
  EXPECT_DOUBLE_EQ(WassersteinOrder::finite(4.0).q, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(WassersteinOrder::infinity().q, 1.0);
  EXPECT_TRUE(WassersteinOrder::infinity().is_inf());
  EXPECT_THROW(WassersteinOrder::finite(1.0), ConfigError);
}

TEST(DiscreteMeasure, Validation) {
  EXPECT_THROW(DiscreteMeasure::from_1d({0.0, 1.0}, {0.5, 0.6}), ConfigError);
  EXPECT_THROW(DiscreteMeasure::from_1d({0.0}, {-1.0}), ConfigError);
  EXPECT_THROW(DiscreteMeasure::from_1d({}, {}), ConfigError);
  EXPECT_THROW(DiscreteMeasure::from_1d({3.0}, {1.0}, StateSpace::interval(-1, 1)), ConfigError);
  const DiscreteMeasure dup = DiscreteMeasure::from_1d({1.0, 1.0, -1.0}, {0.25, 0.25, 0.5});
  EXPECT_EQ(dup.size(), 3);
  const DiscreteMeasure near = DiscreteMeasure::from_1d({0.0, 1.0}, {0.5, 0.5 + 5e-13});
  EXPECT_NEAR(near.weights().sum(), 1.0, 1e-15);
}

TEST(Models, Binomial) {
  const DiscreteMeasure P = binomial_model(0.25);
  ASSERT_EQ(P.size(), 2);
  EXPECT_EQ(P.points()(0, 0), -1.0);
  EXPECT_EQ(P.points()(0, 1), 1.0);
  EXPECT_EQ(P.weight(0), 0.25);
  EXPECT_EQ(P.weight(1), 0.75);
  const Moments m = moments(P);
  EXPECT_DOUBLE_EQ(m.mean(0), 0.5);
  EXPECT_DOUBLE_EQ(m.covariance(0, 0), 0.75);
  EXPECT_NEAR(m.sharpe(), 0.57735026918962576, 1e-15);
  EXPECT_DOUBLE_EQ(P.state_space().lower()(0), -1.25);
  EXPECT_THROW(binomial_model(0.0), ConfigError);
  EXPECT_THROW(binomial_model(1.0), ConfigError);
}

TEST(Models, NormalMoments) {
  const DiscreteMeasure P = normal_model(0.1, 0.2, 128);
  EXPECT_EQ(P.size(), 128);
  EXPECT_TRUE(P.unbounded_support_model());
  const Moments m = moments(P);
  EXPECT_NEAR(m.mean(0), 0.1, 1e-10);
  EXPECT_NEAR(m.covariance(0, 0), 0.04, 1e-10);
}

TEST(Models, ShiftedLognormalMean) {
  const DiscreteMeasure P = shifted_lognormal_model(-0.5, 1.0, 256);
  EXPECT_NEAR(moments(P).mean(0), 0.0, 1e-8);
  EXPECT_DOUBLE_EQ(P.state_space().lower()(0), -1.0);
  for (int i = 0; i < P.size(); ++i) EXPECT_GT(P.points()(0, i), -1.0);
}

TEST(Models, QuadratureConvergence) {
  // Gauss-Hermite is exact for the normal variance, so the error is at
  // rounding level for every n; convergence shows on non-polynomial moments.
  const double e32 = std::abs(moments(normal_model(0.1, 0.2, 32)).covariance(0, 0) - 0.04);
  const double e64 = std::abs(moments(normal_model(0.1, 0.2, 64)).covariance(0, 0) - 0.04);
  EXPECT_LE(e32, 1e-15);
  EXPECT_LE(e64, 1e-15);
  const double mu = -0.5, s = 1.0;
  const double var = std::exp(2 * mu + 2 * s * s) - std::exp(2 * mu + s * s);
  const double f8 = std::abs(moments(shifted_lognormal_model(mu, s, 8)).covariance(0, 0) - var);
  const double f16 = std::abs(moments(shifted_lognormal_model(mu, s, 16)).covariance(0, 0) - var);
  EXPECT_GE(f8 / f16, 4.0);
}

TEST(Models, TruncatedNormal) {
  const DiscreteMeasure P = truncated_normal_model(1.0, 0.5, 1.0, 32);
  EXPECT_NEAR(P.weights().sum(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(P.state_space().lower()(0), 0.0);
  EXPECT_DOUBLE_EQ(P.state_space().upper()(0), 2.0);
  EXPECT_NEAR(moments(P).mean(0), 1.0, 1e-12);
  EXPECT_FALSE(P.unbounded_support_model());
}

TEST(Models, ExplicitDescriptor) {
  ModelDescriptor d;
  d.kind = ModelDescriptor::Kind::explicit_points;
  d.points = Mat(1, 3);
  d.points << -1.0, 0.5, 2.0;
  d.weights = Vec(3);
  d.weights << 0.2, 0.3, 0.5;
  const DiscreteMeasure P = make_model(d);
  EXPECT_EQ(P.size(), 3);
  d.weights(0) = 0.3;
  EXPECT_THROW(make_model(d), ConfigError);
}

TEST(Wasserstein, PointMasses) {
  for (const WassersteinOrder& o : {WassersteinOrder::finite(1.5), WassersteinOrder::finite(2.0),
                                    WassersteinOrder::infinity()}) {
    EXPECT_NEAR(wasserstein_distance(point_mass(0.0), point_mass(-0.7), o), 0.7, 1e-15);
  }
}

TEST(Wasserstein, BinomialPair) {
  EXPECT_NEAR(wasserstein_distance(binomial_model(0.25), binomial_model(0.5), WassersteinOrder::finite(2.0)), 1.0,
              1e-14);
  EXPECT_NEAR(wasserstein_distance(binomial_model(0.25), binomial_model(0.5), WassersteinOrder::infinity()), 2.0,
              1e-14);
}

TEST(Wasserstein, TranslationGivesShift) {
  const DiscreteMeasure P = normal_model(0.0, 1.0, 32);
  for (const WassersteinOrder& o : {WassersteinOrder::finite(1.5), WassersteinOrder::finite(3.0),
                                    WassersteinOrder::infinity()}) {
    const DiscreteMeasure Q = translate(P, Vec::Constant(1, -0.1));
    EXPECT_NEAR(wasserstein_distance(P, Q, o), 0.1, 1e-12);
  }
}

TEST(Wasserstein, MetricAxiomsRandom1d) {
  std::mt19937 rng(7);
  for (int t = 0; t < 40; ++t) {
    const DiscreteMeasure P = random_measure(rng, 1 + t % 6), Q = random_measure(rng, 1 + (t + 2) % 6),
                          R = random_measure(rng, 1 + (t + 4) % 6);
    double prev = 0.0;
    for (const WassersteinOrder& o : {WassersteinOrder::finite(1.5), WassersteinOrder::finite(2.0),
                                      WassersteinOrder::finite(4.0), WassersteinOrder::infinity()}) {
      const double pq = wasserstein_distance(P, Q, o), qp = wasserstein_distance(Q, P, o);
      EXPECT_GE(pq, 0.0);
      EXPECT_NEAR(pq, qp, 1e-12);
      EXPECT_NEAR(wasserstein_distance(P, P, o), 0.0, 1e-14);
      EXPECT_LE(pq, wasserstein_distance(P, R, o) + wasserstein_distance(R, Q, o) + 1e-12);
      EXPECT_GE(pq, prev - 1e-12);  // nondecreasing in p
      prev = pq;
    }
  }
}

TEST(Wasserstein, LpAgreesWithQuantileCouplingIn1d) {
  // Embed 1-d measures in R^2 with a zero second coordinate.
  std::mt19937 rng(11);
  for (int t = 0; t < 10; ++t) {
    const DiscreteMeasure P = random_measure(rng, 4), Q = random_measure(rng, 5);
    auto lift = [](const DiscreteMeasure& M) {
      Mat pts = Mat::Zero(2, M.size());
      pts.row(0) = M.points().row(0);
      return DiscreteMeasure::normalized(pts, M.weights(), StateSpace::whole(2));
    };
    for (const WassersteinOrder& o : {WassersteinOrder::finite(2.0), WassersteinOrder::infinity()}) {
      EXPECT_NEAR(wasserstein_distance(lift(P), lift(Q), o), wasserstein_distance(P, Q, o), 1e-9);
    }
  }
}

TEST(Wasserstein, MetricAxiomsRandom2d) {
  std::mt19937 rng(3);
  for (int t = 0; t < 10; ++t) {
    const DiscreteMeasure P = random_measure(rng, 3, 2), Q = random_measure(rng, 4, 2),
                          R = random_measure(rng, 2, 2);
    for (const WassersteinOrder& o : {WassersteinOrder::finite(2.0), WassersteinOrder::infinity()}) {
      const double pq = wasserstein_distance(P, Q, o);
      EXPECT_NEAR(pq, wasserstein_distance(Q, P, o), 1e-9);
      EXPECT_NEAR(wasserstein_distance(P, P, o), 0.0, 1e-9);
      EXPECT_LE(pq, wasserstein_distance(P, R, o) + wasserstein_distance(R, Q, o) + 1e-9);
    }
  }
}

TEST(Wasserstein, Errors) {
  Mat pts = Mat::Zero(2, 13);
  for (int i = 0; i < 13; ++i) pts(0, i) = i;
  const DiscreteMeasure big = DiscreteMeasure::normalized(pts, Vec::Ones(13), StateSpace::whole(2));
  EXPECT_THROW(wasserstein_distance(big, big, WassersteinOrder::finite(2.0)), ConfigError);
  EXPECT_THROW(wasserstein_distance(big, binomial_model(0.25), WassersteinOrder::finite(2.0)), ConfigError);
}

TEST(Pushforward, ShiftAndIdentity) {
  const DiscreteMeasure P = binomial_model(0.25);
  const DiscreteMeasure Q = pushforward(P, [](const Vec& x) { Vec y = x; y(0) -= 0.1; return y; });
  EXPECT_DOUBLE_EQ(Q.points()(0, 0), -1.1);
  EXPECT_DOUBLE_EQ(Q.points()(0, 1), 0.9);
  EXPECT_EQ(Q.weight(0), 0.25);
  EXPECT_NEAR(wasserstein_distance(P, Q, WassersteinOrder::infinity()), 0.1, 1e-15);
  const DiscreteMeasure I = pushforward(P, [](const Vec& x) { return x; });
  EXPECT_EQ(I.points(), P.points());
  EXPECT_EQ(I.weights(), P.weights());
}

TEST(Pushforward, StateSpaceClipping) {
  const DiscreteMeasure P = binomial_model(0.25);  // S = [-1.25, 1.25]
  auto shift = [](const Vec& x) { Vec y = x; y(0) -= 0.5; return y; };
  EXPECT_THROW(pushforward(P, shift), AssumptionError);
  const DiscreteMeasure Q = pushforward(P, shift, ClipMode::clip);
  EXPECT_DOUBLE_EQ(Q.points()(0, 0), -1.25);
  EXPECT_DOUBLE_EQ(Q.points()(0, 1), 0.5);
}

TEST(Moments, DegenerateSharpe) {
  EXPECT_THROW(moments(point_mass(1.0)).sharpe(), AssumptionError);
}

TEST(NoArbitrage, OneDimensional) {
  EXPECT_TRUE(no_arbitrage_check(binomial_model(0.25)));
  EXPECT_FALSE(no_arbitrage_check(point_mass(1.0)));
  EXPECT_FALSE(no_arbitrage_check(DiscreteMeasure::from_1d({0.5, 1.0}, {0.5, 0.5})));
  EXPECT_FALSE(no_arbitrage_check(DiscreteMeasure::from_1d({0.0, 1.0}, {0.5, 0.5})));
}

TEST(NoArbitrage, TwoDimensional) {
  Mat pts(2, 3);
  pts << 1.0, -1.0, 0.0,
         0.0, 1.0, -1.0;
  EXPECT_TRUE(no_arbitrage_check(DiscreteMeasure::normalized(pts, Vec::Ones(3), StateSpace::whole(2))));
  Mat half(2, 3);
  half << 1.0, 2.0, 0.5,
          0.0, 1.0, -1.0;
  EXPECT_FALSE(no_arbitrage_check(DiscreteMeasure::normalized(half, Vec::Ones(3), StateSpace::whole(2))));
  Mat line(2, 2);  // support on a line: degenerate in the orthogonal direction
  line << 1.0, -1.0,
          1.0, -1.0;
  EXPECT_FALSE(no_arbitrage_check(DiscreteMeasure::normalized(line, Vec::Ones(2), StateSpace::whole(2))));
}

TEST(Lp, SmallProblems) {
  // min -x1 - x2  s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6
  Vec c(4);
  c << -1, -1, 0, 0;
  Mat A(2, 4);
  A << 1, 2, 1, 0,
       3, 1, 0, 1;
  Vec b(2);
  b << 4, 6;
  const LpResult r = solve_lp(c, A, b);
  ASSERT_EQ(r.status, LpResult::Status::optimal);
  EXPECT_NEAR(r.objective, -2.8, 1e-12);
  Mat Ai(1, 1);
  Ai << 1;
  EXPECT_EQ(solve_lp(Vec::Ones(1), Ai, Vec::Constant(1, -1.0)).status, LpResult::Status::infeasible);
  Mat Au(1, 2);
  Au << 1, -1;
  EXPECT_EQ(solve_lp(Vec::Constant(2, -1.0), Au, Vec::Zero(1)).status, LpResult::Status::unbounded);
}

TEST(Models, BreakpointRulesIntegrateKinks) {
  // E[(X - k)^+] = sigma phi(z) + (mu - k)(1 - Phi(z)), z = (k - mu)/sigma.
  const double mu = 0.1, sigma = 0.2, k = 0.13;
  const auto call = [&](const DiscreteMeasure& P) {
    return P.expect([&](const Vec& x) { return std::max(x(0) - k, 0.0); });
  };
  const double z = (k - mu) / sigma;
  const double exact = sigma * std::exp(-z * z / 2) / std::sqrt(2 * M_PI) + (mu - k) * 0.5 * std::erfc(z / std::sqrt(2.0));
  const DiscreteMeasure split = normal_model(mu, sigma, 64, {k});
  EXPECT_NEAR(call(split), exact, 1e-14);
  EXPECT_GT(std::abs(call(normal_model(mu, sigma, 64)) - exact), 1e-7);
  const Moments m = moments(split);
  EXPECT_NEAR(m.mean(0), mu, 1e-14);
  EXPECT_NEAR(m.covariance(0, 0), sigma * sigma, 1e-14);
  EXPECT_NEAR(split.weights().sum(), 1.0, 1e-14);
  EXPECT_EQ(split.size(), 128);
  // Shifted lognormal: E[X] = exp(mu + sigma^2/2) - 1 with or without a split.
  const DiscreteMeasure ln = shifted_lognormal_model(-1.0, 0.25, 64, {-0.8, 0.0});
  EXPECT_NEAR(moments(ln).mean(0), std::exp(-1.0 + 0.03125) - 1.0, 1e-13);
  // Breakpoints outside the truncation window are ignored.
  const DiscreteMeasure far = normal_model(mu, sigma, 16, {50.0});
  EXPECT_EQ(far.size(), 16);
  EXPECT_NEAR(moments(far).covariance(0, 0), sigma * sigma, 1e-14);
}
