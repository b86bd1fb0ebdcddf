// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>

#include "robustfolio/errors.hpp"
#include "robustfolio/measures.hpp"
#include "robustfolio/payoff.hpp"

using namespace robustfolio;

TEST(Payoff, Power) {
  const Payoff g = Payoff::power(3);
  EXPECT_DOUBLE_EQ(g.value(-2.0), -8.0);
  EXPECT_DOUBLE_EQ(g.derivative(-2.0), 12.0);
  EXPECT_TRUE(g.kinks().empty());
}

TEST(Payoff, CallSmoothing) {
  const double s = 1e-2;
  const Payoff g = Payoff::call(0.5, s);
  EXPECT_DOUBLE_EQ(g.value(0.2), 0.0);
  EXPECT_DOUBLE_EQ(g.value(0.8), 0.3);
  EXPECT_NEAR(g.value(0.5), s / 4.0, 1e-15);
  EXPECT_NEAR(g.derivative(0.5), 0.5, 1e-15);
  // C1 at the ends of the smoothing window
  EXPECT_NEAR(g.value(0.5 + s), s, 1e-15);
  EXPECT_NEAR(g.derivative(0.5 + s), 1.0, 1e-15);
  EXPECT_NEAR(g.derivative(0.5 - s), 0.0, 1e-15);
  ASSERT_EQ(g.kinks().size(), 1u);
}

TEST(Payoff, UnsmoothedKinkUsesMidpointSlope) {
  const Payoff g = Payoff::call(0.0, 0.0);
  EXPECT_DOUBLE_EQ(g.derivative(0.0), 0.5);
  EXPECT_DOUBLE_EQ(g.derivative(0.1), 1.0);
}

TEST(Payoff, ButterflyIsTent) {
  const Payoff g = Payoff::butterfly(0.8, 0.0);
  EXPECT_DOUBLE_EQ(g.value(0.0), 0.8);
  EXPECT_NEAR(g.value(0.3), 0.5, 1e-15);
  EXPECT_NEAR(g.value(-0.3), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(g.value(1.0), 0.0);
  EXPECT_DOUBLE_EQ(g.value(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(g.derivative(-0.3), 1.0);
  EXPECT_DOUBLE_EQ(g.derivative(0.3), -1.0);
  EXPECT_EQ(g.kinks().size(), 3u);
}

TEST(Payoff, AbsShift) {
  const Payoff g = Payoff::abs_shift(0.3, 0.0);
  EXPECT_DOUBLE_EQ(g.value(-1.0), 0.7);
  EXPECT_DOUBLE_EQ(g.value(1.0), 1.3);
  EXPECT_DOUBLE_EQ(g.derivative(-1.0), -1.0);
}

TEST(Payoff, PreparedForDropsSmoothingAwayFromKinks) {
  const Payoff g = Payoff::call(0.0);
  EXPECT_EQ(g.prepared_for(binomial_model(0.25)).smoothing(), 0.0);
  const DiscreteMeasure near = DiscreteMeasure::from_1d({-1.0, 5e-5, 1.0}, {0.3, 0.3, 0.4});
  EXPECT_EQ(g.prepared_for(near).smoothing(), kDefaultSmoothing);
}

TEST(Payoff, TableInterpolates) {
  const Payoff g = Payoff::table({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
  EXPECT_DOUBLE_EQ(g.value(0.5), 0.5);
  EXPECT_DOUBLE_EQ(g.value(1.5), 2.5);
  EXPECT_DOUBLE_EQ(g.value(3.0), 7.0);  // linear extrapolation
  EXPECT_DOUBLE_EQ(g.derivative(1.0), 2.0);
  EXPECT_THROW(Payoff::table({0.0, 0.0}, {1.0, 2.0}), ConfigError);
  EXPECT_THROW(Payoff::table({0.0}, {1.0}), ConfigError);
}

TEST(Payoff, CombinationIsLinear) {
  const Payoff g = Payoff::combination({{2.0, Payoff::power(2)}, {-1.0, Payoff::constant(3.0)}});
  EXPECT_DOUBLE_EQ(g.value(1.5), 2.0 * 2.25 - 3.0);
  EXPECT_DOUBLE_EQ(g.derivative(1.5), 6.0);
}

TEST(Payoff, AssetCoordinate) {
  const Payoff g = Payoff::power(2).on_asset(1);
  Vec x(2);
  x << 3.0, -2.0;
  EXPECT_DOUBLE_EQ(g.value(x), 4.0);
  const Vec grad = g.gradient(x);
  EXPECT_DOUBLE_EQ(grad(0), 0.0);
  EXPECT_DOUBLE_EQ(grad(1), -4.0);
  EXPECT_THROW(Payoff::power(2).on_asset(-1), ConfigError);
}
