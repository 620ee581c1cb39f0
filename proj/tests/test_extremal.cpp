#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gosbounds/dfr_bounds.hpp"
#include "gosbounds/dfra_bounds.hpp"
#include "gosbounds/extremal.hpp"

using namespace gosbounds;

namespace {

void expect_moments(const ExtremalDistribution& d, double tol = 1e-6) {
  const auto& m = d.moments();
  EXPECT_NEAR(d.mean(), m.mu, tol * m.sigma_p) << d.label();
  EXPECT_NEAR(d.central_abs_moment(), std::pow(m.sigma_p, m.p), tol * std::pow(m.sigma_p, m.p)) << d.label();
}

void expect_monotone(const ExtremalDistribution& d) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> us(1000);
  for (double& v : us) v = u(rng);
  std::sort(us.begin(), us.end());
  double prev = -kInf;
  for (double v : us) {
    if (v <= 0.0) continue;
    const double q = d.quantile(v);
    EXPECT_GE(q, prev);
    prev = q;
  }
}

// Second differences of F^-1(V(x)) on a grid: the composition is convex for DFR.
void expect_convex_composition(const ExtremalDistribution& d, double x_max = 12.0) {
  const double h = 1e-3;
  for (double x = h; x < x_max; x += 0.0371) {
    const double dd = d.composed(x + h) - 2.0 * d.composed(x) + d.composed(x - h);
    EXPECT_GE(dd, -1e-8) << d.label() << " at " << x;
  }
}

}  // namespace

TEST(Extremal, AtomExponentialFirstGos) {
  // p = 1: atom at mu - 1/2 e^{e^-a} sigma_1, scale 1/2 e^{e^-a + a} sigma_1.
  const auto r = bound_first_gos_p1(1.2);
  ASSERT_TRUE(r.attainer);
  const double a = *r.alpha_or_y;
  const auto& pieces = r.attainer->pieces();
  ASSERT_EQ(pieces.size(), 2u);
  EXPECT_NEAR(std::get<Atom>(pieces[0].shape).value, -0.5 * std::exp(std::exp(-a)), 1e-10);
  EXPECT_NEAR(std::get<ExponentialTail>(pieces[1].shape).scale, 0.5 * std::exp(std::exp(-a) + a), 1e-9);
  expect_moments(*r.attainer);
  expect_monotone(*r.attainer);
  expect_convex_composition(*r.attainer);
}

TEST(Extremal, AtomExponentialAlphaZero) {
  const auto d = attainer_prop2(0.0, 1.0, 1.0, MomentSpec::standard(2.0));
  ASSERT_EQ(d.pieces().size(), 1u);
  EXPECT_NEAR(d.quantile(0.5), -1.0 + std::log(2.0), 1e-14);
  EXPECT_THROW(attainer_prop2(1.0, -1.0, 1.0, MomentSpec::standard(2.0)), Error);
  EXPECT_THROW(attainer_prop2(1.0, 1.0, 0.0, MomentSpec::standard(2.0)), Error);
}

TEST(Extremal, AtomExponentialMomentsForSeveralP) {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const GosParams par({3, 2});
    const GosDensity dens(par);
    const double a = 0.7;
    const double bp = p == 1.0 ? b1_value(dens, a) : bp_value(dens, p, a);
    const MomentSpec m{p, 2.0, 3.0};
    const auto d = attainer_prop2(a, b_coefficient(dens, a), bp, m);
    expect_moments(d);
    // At the chosen alpha the standardized expectation equals -B_p(alpha).
    EXPECT_NEAR(d.standardized_expectation(dens), -bp, 1e-8) << p;
  }
}

TEST(Extremal, LinearAttainer) {
  const auto d = attainer_theorem1_linear(MomentSpec::standard(2.0));
  for (double u : {0.1, 0.5, 0.99}) EXPECT_NEAR(d.quantile(u), -1.0 - std::log1p(-u), 1e-14);
  EXPECT_NEAR(d.mean(), 0.0, 1e-10);
  EXPECT_NEAR(d.central_abs_moment(), 1.0, 1e-10);
  EXPECT_THROW(attainer_theorem1_linear(MomentSpec::standard(1.0)), Error);
  EXPECT_THROW(d.quantile(1.0), Error);
  EXPECT_GT(d.quantile(1.0 - 1e-15), 30.0);
}

TEST(Extremal, ProjectionAttainer) {
  const auto r = bound_projection_C(GosParams({1.4, 1.4, 1.4}), {}, MomentSpec{2.0, 1.0, 2.0});
  ASSERT_TRUE(r.attainer);
  const auto& d = *r.attainer;
  const double y = *r.alpha_or_y, c = r.value;
  const GosDensity dens(GosParams({1.4, 1.4, 1.4}));
  // Lowest value mu - sigma/C, then continuity at y*.
  EXPECT_NEAR(d.composed(0.0), 1.0 - 2.0 / c, 1e-12);
  EXPECT_NEAR(d.composed(y - 1e-12), d.composed(y + 1e-12), 1e-8);
  EXPECT_NEAR((d.composed(y) - 1.0) / 2.0, (dens.f_hat(y) - 1.0) / c, 1e-10);
  expect_moments(d);
  expect_monotone(d);
  expect_convex_composition(d);
  EXPECT_NEAR(d.standardized_expectation(dens), c, 1e-8);
}

TEST(Extremal, FirstGosSequenceMember) {
  const MomentSpec m{2.0, 0.0, 1.0};
  const auto d = attainer_prop3(2.0, 2.0, 0.5, m);
  EXPECT_NEAR(std::get<Atom>(d.pieces()[0].shape).value, -0.5 / std::sqrt(0.75), 1e-14);
  EXPECT_NEAR(d.pieces()[0].u_hi() - d.pieces()[0].u_lo() + (d.pieces()[1].u_hi() - d.pieces()[1].u_lo()), 1.0, 1e-15);
  expect_moments(d);
  for (double p : {1.0, 1.7, 3.0}) expect_moments(attainer_prop3(1.5, p, 0.2, MomentSpec{p, -1.0, 0.5}));
  EXPECT_THROW(attainer_prop3(2.0, 2.0, 1.0, m), Error);
  EXPECT_THROW(attainer_prop3(2.0, 2.0, 0.0, m), Error);
}

TEST(Extremal, DfraAttainer) {
  const GosParams par({3, 2});
  const auto r = bound_dfra(par, 1.0);
  ASSERT_TRUE(r.attainer);
  const auto& d = *r.attainer;
  expect_moments(d);
  expect_monotone(d);
  // DFRA: (F^-1(V(x)) - F^-1(0+)) / x nondecreasing.
  const double base = d.composed(0.0);
  double prev = -kInf;
  for (double x = 0.01; x < 20.0; x += 0.05) {
    const double ratio = (d.composed(x) - base) / x;
    EXPECT_GE(ratio, prev - 1e-12);
    prev = ratio;
  }
  // The base function -kappa 1{x < a} + (x - kappa) 1{x >= a} has mean zero under e^-x.
  const double a = *r.alpha_or_y, kappa = (a + 1.0) * std::exp(-a);
  EXPECT_NEAR(-kappa * (1.0 - std::exp(-a)) + std::exp(-a) * (a + 1.0 - kappa), 0.0, 1e-14);
  EXPECT_NEAR(d.standardized_expectation(GosDensity(par)), r.value, 1e-8);
}

TEST(Extremal, CdfInvertsQuantile) {
  const auto d = attainer_prop2(0.9, 4.0, 0.2, MomentSpec::standard(2.0));
  for (double u : {0.5, 0.7, 0.95}) {
    const double t = d.quantile(u);
    if (u > d.pieces()[0].u_hi()) EXPECT_NEAR(d.cdf(t), u, 1e-10);
  }
  EXPECT_EQ(d.cdf(d.composed(0.0) - 1.0), 0.0);
  EXPECT_NEAR(d.cdf(d.composed(0.0)), d.pieces()[0].u_hi(), 1e-10);
}
