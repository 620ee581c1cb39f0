#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gosbounds/density.hpp"
#include "gosbounds/numerics.hpp"
#include "oracles.hpp"

using namespace gosbounds;

TEST(Density, FirstGos) {
  EXPECT_NEAR(density_hat(new_params({2}), 0.0), 2.0, 1e-15);
  for (double x : {0.0, 0.7, 12.0}) EXPECT_NEAR(density_hat(new_params({1}), x), 1.0, 1e-15);
  for (double x : {0.1, 1.0, 5.0}) EXPECT_NEAR(density_hat(new_params({2.5}), x), 2.5 * std::exp(-1.5 * x), 1e-13);
}

TEST(Density, TwoRates) {
  const double want = 2.0 * (1.0 - std::exp(-1.0));
  EXPECT_NEAR(density_hat(new_params({2, 1}), 1.0), want, 1e-14);
  EXPECT_NEAR(std::exp(-1.0) * want, oracle::hypoexp_convolution({2, 1}, 1.0), 1e-12);
}

TEST(Density, DensityU) {
  EXPECT_NEAR(density_u(new_params({2}), 0.5), 1.0, 1e-14);
  EXPECT_NEAR(density_u(new_params({2, 1}), 0.25), 0.5, 1e-14);
  EXPECT_NEAR(density_u(new_params({1}), 0.7), 1.0, 1e-14);
  EXPECT_THROW(density_u(new_params({1}), 1.0), Error);
  EXPECT_THROW(density_u(new_params({1}), 0.0), Error);
}

TEST(Density, MatchesTextbookAndExpm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.3, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> g(2 + trial % 5);
    for (double& v : g) v = u(rng);
    const GosDensity d{GosParams(g)};
    for (double x : {0.05, 0.5, 2.0, 7.0}) {
      double magnitude = 0.0;
      const double ref = oracle::hypoexp_distinct(g, x, &magnitude);
      const double got = d.hypoexp_density(d.rank(), x);
      // The textbook sum is only trusted while its own cancellation is mild.
      if (magnitude < 1e6 * std::abs(ref)) EXPECT_NEAR(got, ref, 1e-9 * std::abs(ref) + 1e-14);
      EXPECT_NEAR(d.f_hat(d.rank(), x), d.f_hat_via_expm(d.rank(), x), 1e-9 * std::abs(got * std::exp(x)) + 1e-12);
    }
  }
}

TEST(Density, RepeatedRates) {
  const GosDensity d{new_params({1.5, 1.5, 1.5, 1.5})};
  for (double x : {0.01, 0.8, 3.0, 20.0}) EXPECT_NEAR(d.hypoexp_density(4, x), oracle::erlang(4, 1.5, x), 1e-13);
  const GosDensity mixed{new_params({3, 2, 2})};
  for (double x : {0.2, 1.0, 4.0}) {
    EXPECT_NEAR(mixed.hypoexp_density(3, x), oracle::hypoexp_convolution({3, 2, 2}, x), 1e-9);
  }
}

TEST(Density, NearlyCoincidentRatesAreStable) {
  const GosDensity near{new_params({2.0, 2.0 + 1e-9, 1.0})};
  const GosDensity exact{new_params({2.0, 2.0, 1.0})};
  for (double x : {0.1, 1.0, 5.0}) EXPECT_NEAR(near.f_hat(x), exact.f_hat(x), 1e-7 * exact.f_hat(x));
}

TEST(Density, HighRankNearZero) {
  const GosDensity d{new_params({10, 9, 8, 7, 6, 5, 4, 3, 2, 1})};
  const double x = 1e-3;
  const double got = d.f_hat(x);
  EXPECT_GT(got, 0.0);
  EXPECT_NEAR(got, d.f_hat_via_expm(10, x), 1e-8 * got);
}

TEST(Density, Normalization) {
  for (auto g : std::vector<std::vector<double>>{{2}, {2, 1}, {4, 2}, {3, 3, 1.2}, {6, 5, 4, 3, 2}, {1.4, 1.4, 1.4}, {0.6}}) {
    const GosDensity d{GosParams(g)};
    const auto q = integrate_checked([&](double x) { return d.hypoexp_density(d.rank(), x); }, 0.0, kInf);
    EXPECT_NEAR(q.value, 1.0, 1e-8);
    if (d.params().min_gamma() >= 1.0) {
      // Bounded on (0,1) in this case, so the u-scale integral converges too.
      const double u_mass = oracle::simpson([&](double u) { return d.density_u(u); }, 1e-15, 1.0 - 1e-15, 1e-13);
      EXPECT_NEAR(u_mass, 1.0, 1e-8);
    }
  }
}

TEST(Density, TailIdentities) {
  for (auto g : std::vector<std::vector<double>>{{2}, {4, 2}, {3, 2, 1.5}, {5, 5, 2}, {1.4, 1.4, 1.4}, {8, 3, 1, 0.7}}) {
    const GosParams p(g);
    const GosDensity d(p);
    EXPECT_NEAR(d.tail_integral_0(0.0), 1.0, 1e-13);
    EXPECT_NEAR(d.tail_integral_1(0.0), p.rho(1), 1e-13);
    for (double a : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      auto h = [&](double x) { return d.hypoexp_density(d.rank(), x); };
      const double t0 = oracle::simpson_halfline(h, a, 0.5);
      const double t1 = oracle::simpson_halfline([&](double x) { return (x - a) * h(x); }, a, 0.5);
      EXPECT_NEAR(d.tail_integral_0(a), t0, 1e-10 * t0) << a;
      EXPECT_NEAR(d.tail_integral_1(a), t1, 1e-10 * t1) << a;
    }
  }
  EXPECT_NEAR(tail_integral_0(new_params({2}), 1.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(tail_integral_1(new_params({2}), 0.0), 0.5, 1e-15);
}

TEST(Density, CdfU) {
  const GosDensity d{new_params({2, 1})};
  for (double u : {0.1, 0.5, 0.9}) EXPECT_NEAR(d.cdf_u(u), u * u, 1e-13);
}

TEST(Density, Derivatives) {
  EXPECT_NEAR(density_hat_derivatives(new_params({2}), 0.0, 1), -2.0, 1e-14);
  EXPECT_NEAR(density_hat_derivatives(new_params({1}), 3.0, 1), 0.0, 1e-14);
  const auto p = new_params({2, 1});
  const double h = 1e-4, x = 0.5;
  const double fd = (density_hat(p, x + h) - 2.0 * density_hat(p, x) + density_hat(p, x - h)) / (h * h);
  EXPECT_NEAR(density_hat_derivatives(p, x, 2), fd, 1e-6);
  const GosDensity d{new_params({5, 3, 2})};
  for (double y : {0.3, 1.1, 2.7}) {
    const double fd1 = (d.f_hat(y + h) - d.f_hat(y - h)) / (2 * h);
    EXPECT_NEAR(d.f_hat(3, y, 1), fd1, 1e-7);
    EXPECT_NEAR(d.f_hat(3, y, 2), d.f_hat_via_expm(3, y, 2), 1e-10);
  }
  EXPECT_THROW(density_hat_derivatives(p, 1.0, 3), Error);
}
