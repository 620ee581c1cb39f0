#pragma once

#include <cmath>
#include <string>

#include "gosbounds/error.hpp"
#include "gosbounds/numerics.hpp"

namespace gosbounds {

/// Location/scale of the parent distribution: mean mu and p-th central
/// absolute moment sigma_p^p = E|X - mu|^p.
struct MomentSpec {
  double p = 2.0;
  double mu = 0.0;
  double sigma_p = 1.0;

  static MomentSpec standard(double p) { return {p, 0.0, 1.0}; }

  void validate() const {
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::DomainError, "moment order p must be >= 1");
    if (!(sigma_p > 0.0) || !std::isfinite(sigma_p)) throw Error(ErrorCode::DomainError, "sigma_p must be positive");
    if (!std::isfinite(mu)) throw Error(ErrorCode::DomainError, "mu must be finite");
  }
};

inline bool is_integer_order(double p) { return p == std::floor(p) && p <= 64.0; }

/// int_0^a u^p e^u du for a >= 0 and p >= 0, from the everywhere convergent
/// series sum_k a^{p+k+1} / (k! (p+k+1)). Every term is positive, so there
/// is no cancellation even when a is tiny.
inline double exp_power_integral(double p, double a) {
  if (a < 0.0) throw Error(ErrorCode::DomainError, "upper limit must be nonnegative");
  if (a == 0.0) return 0.0;
  double power = std::pow(a, p + 1.0);  // a^{p+k+1} / k!
  double sum = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double term = power / (p + k + 1.0);
    sum += term;
    if (term <= 1e-17 * sum) break;
    power *= a / (k + 1.0);
  }
  return sum;
}

/// int_0^inf (s + delta)^p e^-s ds = e^delta Gamma(p + 1, delta), delta >= 0.
/// Binomial closed form for integer p, adaptive quadrature otherwise.
inline double shifted_gamma_integral(double p, double delta, const Tolerances& tol = {}) {
  if (delta < 0.0) throw Error(ErrorCode::DomainError, "shift must be nonnegative");
  if (is_integer_order(p)) {
    const int n = static_cast<int>(p);
    double sum = 0.0, binom = 1.0, fact = 1.0;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) {
        binom = binom * (n - k + 1) / k;
        fact *= k;
      }
      sum += binom * std::pow(delta, n - k) * fact;
    }
    return sum;
  }
  return integrate([&](double s) { return std::pow(s + delta, p) * std::exp(-s); }, 0.0, kInf, tol);
}

/// E|E - 1|^p for a standard exponential E.
inline double exponential_central_abs_moment(double p) {
  return std::exp(-1.0) * (exp_power_integral(p, 1.0) + std::tgamma(p + 1.0));
}

/// Normalizing constant of the two-point-plus-exponential family
///   N_p(a) = [a^p - a^{p+1} + a e^-a (int_0^a y^p e^y dy + Gamma(p+1))]^{1/p}.
/// N_p(a)^p is also the p-th absolute moment of the broken line
/// min-shifted at e^-alpha with a = e^-alpha.
inline double normalizer_np(double p, double a) {
  const double inner = std::pow(a, p) - std::pow(a, p + 1.0) + a * std::exp(-a) * (exp_power_integral(p, a) + std::tgamma(p + 1.0));
  return std::pow(inner, 1.0 / p);
}

}  // namespace gosbounds
