#include <gtest/gtest.h>

#include <cmath>

#include "gosbounds/dfra_bounds.hpp"
#include "gosbounds/montecarlo.hpp"
#include "gosbounds/zoo.hpp"
#include "oracles.hpp"

using namespace gosbounds;

TEST(Dfra, AlphaZero) {
  const double a = alpha0();
  EXPECT_NEAR(a, 0.8065, 5e-4);
  EXPECT_NEAR(a, (a + 1.0) * std::exp(-a), 1e-14);
}

TEST(Dfra, AdmissibilityDiagnostics) {
  const GosParams p({3, 2});
  const GosDensity d(p);
  const auto diag = dfra_admissible(p);
  EXPECT_NEAR(d.f_hat(diag.beta_hat), 1.0, 1e-12);
  EXPECT_LT(diag.beta_hat, diag.theta_hat);
  // f_hat_r'' changes sign at theta_hat.
  EXPECT_LT(d.f_hat(2, diag.theta_hat - 1e-4, 2) * d.f_hat(2, diag.theta_hat + 1e-4, 2), 0.0);
  EXPECT_TRUE(diag.condition_holds);
  EXPECT_NEAR(diag.condition_rhs, 1.0 + diag.beta_hat, 1e-15);
}

TEST(Dfra, ConditionReadingsDifferOnlyInLhs) {
  const GosParams p({5, 3});
  const auto a = dfra_admissible(p, {}, ConditionReading::PerRank);
  const auto b = dfra_admissible(p, {}, ConditionReading::LiteralR);
  EXPECT_EQ(a.beta_hat, b.beta_hat);
  EXPECT_NE(a.condition_lhs, b.condition_lhs);
}

TEST(Dfra, Rejections) {
  EXPECT_THROW(dfra_admissible(GosParams({3})), Error);
  try {
    // Equal rates make f_hat_r - 1 start at -1 and never recover past theta_hat.
    bound_dfra(GosParams({1, 1}), 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::NoBetaHat || e.code() == ErrorCode::ConditionFails ||
                e.code() == ErrorCode::NoInflectionPoint)
        << e.what();
  }
  EXPECT_THROW(bstar_value(GosDensity(GosParams({3, 2})), 2.0, -1.0), Error);
}

TEST(Dfra, ReducedMomentMatchesQuadrature) {
  for (double p : {1.0, 2.0, 2.5}) {
    for (double a : {0.2, 0.5, 1.5, 3.0}) {
      const double kappa = (a + 1.0) * std::exp(-a);
      // e^a * int |phi(x)|^p e^-x with phi = -kappa below a, x - kappa above.
      const double below = std::pow(kappa, p) * (1.0 - std::exp(-a));
      const double above = oracle::simpson_halfline([&](double x) { return std::pow(std::abs(x - kappa), p) * std::exp(-x); }, a);
      const double ref = std::exp(a) * (below + above);
      EXPECT_NEAR(dfra_reduced_moment(p, a, a < alpha0()), ref, 1e-9 * ref) << p << " " << a;
    }
  }
}

TEST(Dfra, ContinuityAtAlphaZero) {
  for (auto g : std::vector<std::vector<double>>{{3, 2}, {4, 2}, {5, 3}}) {
    const GosDensity d{GosParams(g)};
    for (double p : {1.0, 2.0}) {
      const double lo = bstar_value(d, p, alpha0() - 1e-8), hi = bstar_value(d, p, alpha0() + 1e-8);
      EXPECT_LT(std::abs(lo - hi), 1e-6 * std::abs(hi));
    }
  }
}

TEST(Dfra, BoundsAreNegativeAndLimitForLargerP) {
  for (auto g : std::vector<std::vector<double>>{{3, 2}, {4, 2}, {5, 3}}) {
    for (double p : {1.0, 2.0, 3.0}) {
      const auto r = bound_dfra(GosParams(g), p);
      EXPECT_LE(r.value, 0.0);
      if (r.attained_in_limit) {
        EXPECT_NEAR(r.value, -bstar_limit_at_infinity(p), 1e-12);
      }
    }
  }
  EXPECT_EQ(bstar_limit_at_infinity(2.0), 0.0);
  EXPECT_EQ(bstar_limit_at_infinity(1.0), 0.5);
}

TEST(Dfra, WeibullStaysBelowBound) {
  const GosParams par({3, 2});
  const auto r = bound_dfra(par, 2.0);
  for (double shape : {0.5, 0.8}) {
    const DfrDistribution w(Weibull{shape, 1.0});
    const auto m = w.moments(2.0);
    const auto est = estimate_standardized_expectation_x(par, [&](double x) { return w.composed(x); }, m, 200000, 9);
    EXPECT_LE(est.mean, r.value + 3.0 * est.std_error) << shape;
  }
}
