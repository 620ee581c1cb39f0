#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gosbounds/error.hpp"
#include "gosbounds/matrix_exp.hpp"
#include "gosbounds/params.hpp"

namespace gosbounds {

/// Nearly coincident rates (relative gap below this) are evaluated through
/// the matrix exponential of the phase generator instead of partial fractions.
inline constexpr double kNearRateRelGap = 1e-6;

struct RateGroup {
  double rate = 0.0;
  int multiplicity = 0;
};

/// Law of S = sum_i V_i / gamma_i with V_i i.i.d. standard exponential, in
/// partial-fraction form
///
///   h(x) = sum_k sum_{m=1}^{n_k} c[k][m-1] x^{m-1} exp(-rate_k x).
///
/// When two distinct groups sit closer than kNearRateRelGap the coefficients
/// blow up with opposite signs; `near_coincident` is then set and evaluation
/// goes through the matrix exponential instead.
struct HypoexpRepr {
  std::vector<RateGroup> groups;
  std::vector<std::vector<double>> coeffs;
  bool near_coincident = false;

  static HypoexpRepr build(std::span<const double> rates_desc) {
    HypoexpRepr out;
    for (double g : rates_desc) {
      if (!out.groups.empty() && std::abs(out.groups.back().rate - g) <= kRateGroupingTol) {
        ++out.groups.back().multiplicity;
      } else {
        out.groups.push_back({g, 1});
      }
    }
    for (std::size_t k = 1; k < out.groups.size(); ++k) {
      const double gap = out.groups[k - 1].rate - out.groups[k].rate;
      if (gap < kNearRateRelGap * out.groups[k - 1].rate) out.near_coincident = true;
    }
    out.coeffs.resize(out.groups.size());
    for (std::size_t k = 0; k < out.groups.size(); ++k) out.coeffs[k] = group_coefficients(out.groups, k);
    return out;
  }

  int total_multiplicity() const {
    int n = 0;
    for (const auto& g : groups) n += g.multiplicity;
    return n;
  }

 private:
  // Laplace transform prod_l (rate_l/(s + rate_l))^{n_l}. Around s = -rate_k
  // write it as G(s) / (s + rate_k)^{n_k}; the coefficient of
  // 1/(s + rate_k)^m is G^{(n_k - m)}(-rate_k) / (n_k - m)!. Derivatives of G
  // follow from G' = G L with L = -sum_{l != k} n_l / (s + rate_l).
  static std::vector<double> group_coefficients(const std::vector<RateGroup>& groups, std::size_t k) {
    const double lk = groups[k].rate;
    const int nk = groups[k].multiplicity;
    double g0 = std::pow(lk, nk);
    for (std::size_t l = 0; l < groups.size(); ++l) {
      if (l == k) continue;
      g0 *= std::pow(groups[l].rate / (groups[l].rate - lk), groups[l].multiplicity);
    }
    // L^{(i)}(-rate_k) = -sum_l n_l (-1)^i i! / d_l^{i+1}, d_l = rate_l - rate_k.
    std::vector<double> dlog(static_cast<std::size_t>(nk), 0.0);
    double factorial = 1.0;
    for (int i = 0; i < nk; ++i) {
      if (i > 0) factorial *= i;
      double s = 0.0;
      for (std::size_t l = 0; l < groups.size(); ++l) {
        if (l == k) continue;
        const double d = groups[l].rate - lk;
        s += groups[l].multiplicity / std::pow(d, i + 1);
      }
      dlog[static_cast<std::size_t>(i)] = -((i % 2 == 0) ? 1.0 : -1.0) * factorial * s;
    }
    std::vector<double> derivs(static_cast<std::size_t>(nk), 0.0);
    derivs[0] = g0;
    for (int n = 1; n < nk; ++n) {
      double acc = 0.0, binom = 1.0;
      for (int i = 0; i < n; ++i) {
        if (i > 0) binom = binom * (n - i) / i;
        acc += binom * dlog[static_cast<std::size_t>(i)] * derivs[static_cast<std::size_t>(n - 1 - i)];
      }
      derivs[static_cast<std::size_t>(n)] = acc;
    }
    // c[m-1] = G^{(nk-m)} / ((nk-m)! (m-1)!)
    std::vector<double> c(static_cast<std::size_t>(nk));
    for (int m = 1; m <= nk; ++m) {
      c[static_cast<std::size_t>(m - 1)] =
          derivs[static_cast<std::size_t>(nk - m)] / (std::tgamma(nk - m + 1.0) * std::tgamma(static_cast<double>(m)));
    }
    return c;
  }
};

/// Density machinery of the uniform gOS U^(r) and of its exponential
/// composition f_hat_j(x) = f_{gamma,j}(1 - e^-x), for every rank j <= r that
/// shares the leading parameters gamma_1..gamma_j.
///
/// f_hat_j(x) e^-x is the density of the hypoexponential sum S_j, so all
/// evaluations work with exp((shift - rate) x) terms and never form e^x on
/// its own. Immutable after construction.
class GosDensity {
 public:
  explicit GosDensity(GosParams params) : params_(std::move(params)) {
    const auto gamma = params_.gamma();
    for (std::size_t j = 1; j <= gamma.size(); ++j) reprs_.push_back(HypoexpRepr::build(gamma.first(j)));
  }

  const GosParams& params() const { return params_; }
  std::size_t rank() const { return params_.rank(); }
  const HypoexpRepr& repr(std::size_t j) const {
    check_rank(j);
    return reprs_[j - 1];
  }

  /// f_hat_{gamma,j}(x), or one of its first two derivatives in x.
  double f_hat(std::size_t j, double x, int order = 0) const { return evaluate(j, x, order, 1.0); }
  double f_hat(double x) const { return f_hat(rank(), x); }

  /// Density of S_j at x, i.e. f_hat_j(x) e^-x.
  double hypoexp_density(std::size_t j, double x) const { return evaluate(j, x, 0, 0.0); }

  /// f_{gamma,r}(u) for u in (0, 1).
  double density_u(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::DomainError, "u must lie in (0,1)");
    return f_hat(-std::log1p(-u));
  }

  /// int_alpha^inf f_hat_r(x) e^-x dx = P(S_r > alpha)
  ///   = e^-alpha sum_j f_hat_j(alpha) / gamma_j.
  double tail_integral_0(double alpha) const {
    check_x(alpha);
    double s = 0.0;
    for (std::size_t j = 1; j <= rank(); ++j) s += hypoexp_density(j, alpha) / params_.gamma(j);
    return s;
  }

  /// int_alpha^inf (x - alpha) f_hat_r(x) e^-x dx = E (S_r - alpha)^+
  ///   = e^-alpha sum_j rho_j f_hat_j(alpha) / gamma_j.
  double tail_integral_1(double alpha) const {
    check_x(alpha);
    double s = 0.0;
    for (std::size_t j = 1; j <= rank(); ++j) s += params_.rho(j) / params_.gamma(j) * hypoexp_density(j, alpha);
    return s;
  }

  /// Cumulative distribution function of U^(r).
  double cdf_u(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return 1.0 - tail_integral_0(-std::log1p(-u));
  }

  /// sum_j w_j f_hat_j(x) for a weight per rank (weights.size() == r).
  double weighted_f_hat(std::span<const double> weights, double x) const {
    double s = 0.0;
    for (std::size_t j = 1; j <= rank(); ++j) s += weights[j - 1] * f_hat(j, x);
    return s;
  }

  /// Matrix-exponential route for f_hat_j, independent of the partial-fraction
  /// coefficients: f_hat_j(x) = gamma_j [e_1^T exp((Q + I) x) M^order]_j with
  /// Q the bidiagonal phase generator of gamma_1..gamma_j and M = Q + I.
  double f_hat_via_expm(std::size_t j, double x, int order = 0, double shift = 1.0) const {
    check_rank(j);
    const auto gamma = params_.gamma();
    SquareMatrix m(j);
    for (std::size_t i = 0; i < j; ++i) {
      m(i, i) = shift - gamma[i];
      if (i + 1 < j) m(i, i + 1) = gamma[i];
    }
    SquareMatrix scaled = m;
    scaled *= x;
    std::vector<double> row(j, 0.0);
    row[0] = 1.0;
    row = expm(scaled).left_multiply(row);
    for (int k = 0; k < order; ++k) row = m.left_multiply(row);
    return gamma[j - 1] * row[j - 1];
  }

 private:
  void check_rank(std::size_t j) const {
    if (j < 1 || j > reprs_.size()) throw Error(ErrorCode::IndexOutOfRange, "rank index out of range");
  }
  static void check_x(double x) {
    if (!(x >= 0.0)) throw Error(ErrorCode::DomainError, "argument must be nonnegative");
  }

  double evaluate(std::size_t j, double x, int order, double shift) const {
    check_x(x);
    if (order < 0 || order > 2) throw Error(ErrorCode::DomainError, "derivative order must be 0, 1 or 2");
    const HypoexpRepr& rep = repr(j);
    if (rep.near_coincident) return f_hat_via_expm(j, x, order, shift);
    double sum = 0.0, magnitude = 0.0;
    for (std::size_t k = 0; k < rep.groups.size(); ++k) {
      const double a = shift - rep.groups[k].rate;
      const double e = std::exp(a * x);
      const auto& c = rep.coeffs[k];
      for (std::size_t mi = 0; mi < c.size(); ++mi) {
        if (c[mi] == 0.0) continue;
        const double m1 = static_cast<double>(mi);  // power of x
        const double term = c[mi] * e * power_poly(m1, a, x, order);
        sum += term;
        magnitude += std::abs(term);
      }
    }
    // Partial fractions cancel badly near x = 0 for high ranks, where the
    // true value behaves like x^(j-1). Recompute through the generator then.
    if (rep.groups.size() > 1 && magnitude > 1e5 * std::abs(sum)) return f_hat_via_expm(j, x, order, shift);
    return sum;
  }

  // d^order/dx^order of x^m e^{a x}, divided by e^{a x}.
  static double power_poly(double m, double a, double x, int order) {
    auto pw = [x](double e) { return e < 0.0 ? 0.0 : (e == 0.0 ? 1.0 : std::pow(x, e)); };
    switch (order) {
      case 0: return pw(m);
      case 1: return m * pw(m - 1) + a * pw(m);
      default: return m * (m - 1) * pw(m - 2) + 2.0 * a * m * pw(m - 1) + a * a * pw(m);
    }
  }

  GosParams params_;
  std::vector<HypoexpRepr> reprs_;
};

inline double density_hat(const GosParams& params, double x) { return GosDensity(params).f_hat(x); }

inline double density_u(const GosParams& params, double u) { return GosDensity(params).density_u(u); }

inline double tail_integral_0(const GosParams& params, double alpha) {
  return GosDensity(params).tail_integral_0(alpha);
}

inline double tail_integral_1(const GosParams& params, double alpha) {
  return GosDensity(params).tail_integral_1(alpha);
}

inline double density_hat_derivatives(const GosParams& params, double x, int order) {
  if (order != 1 && order != 2) throw Error(ErrorCode::DomainError, "derivative order must be 1 or 2");
  return GosDensity(params).f_hat(params.rank(), x, order);
}

}  // namespace gosbounds
