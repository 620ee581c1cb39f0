#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gosbounds/density.hpp"
#include "gosbounds/error.hpp"
#include "gosbounds/extremal.hpp"
#include "gosbounds/moments.hpp"
#include "gosbounds/numerics.hpp"
#include "gosbounds/params.hpp"

namespace gosbounds {

/// rho_{1,r} equal to 1 or 2 within this tolerance counts as the boundary;
/// the lower case wins there.
inline constexpr double kCaseEqualityTol = 1e-12;

enum class DfrCase { RhoBelowOne, RhoEqOne, Linear, ProjectionC };

enum class BoundCase { ZeroExact, ZeroLimit, Linear, ProjectionC, NegativeBp, FirstGosZero, FirstGosP1, DfraNegative };

constexpr std::string_view to_string(DfrCase c) {
  switch (c) {
    case DfrCase::RhoBelowOne: return "RhoBelowOne";
    case DfrCase::RhoEqOne: return "RhoEqOne";
    case DfrCase::Linear: return "Linear";
    case DfrCase::ProjectionC: return "ProjectionC";
  }
  return "?";
}

constexpr std::string_view to_string(BoundCase c) {
  switch (c) {
    case BoundCase::ZeroExact: return "ZeroExact";
    case BoundCase::ZeroLimit: return "ZeroLimit";
    case BoundCase::Linear: return "Linear";
    case BoundCase::ProjectionC: return "ProjectionC";
    case BoundCase::NegativeBp: return "NegativeBp";
    case BoundCase::FirstGosZero: return "FirstGosZero";
    case BoundCase::FirstGosP1: return "FirstGosP1";
    case BoundCase::DfraNegative: return "DfraNegative";
  }
  return "?";
}

/// Upper bound on E (X^(r) - mu)/sigma_p together with how it was obtained.
struct BoundResult {
  double value = 0.0;
  BoundCase bound_case = BoundCase::ZeroExact;
  std::optional<double> alpha_or_y;  ///< minimizer alpha_0 or root y*; empty when at infinity
  bool attained_in_limit = false;
  std::optional<ExtremalDistribution> attainer;
  bool strictly_negative_for_all_f = false;  ///< E X^(r) < mu for every DFR parent, no finite bound known
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
};

/// Parameter conditions under which the nonnegative DFR bounds hold: gamma_1
/// >= 1 when r = 1; otherwise every gamma_i >= 1 and the second smallest > 1.
inline bool theorem1_conditions_hold(const GosParams& params) {
  const auto g = params.gamma();
  if (g.size() == 1) return g[0] >= 1.0;
  if (g.back() < 1.0) return false;
  return g[g.size() - 2] > 1.0;
}

inline DfrCase classify_dfr(const GosParams& params, bool require_theorem1 = false) {
  const double rho = params.rho(1);
  DfrCase c;
  if (std::abs(rho - 1.0) <= kCaseEqualityTol) {
    c = DfrCase::RhoEqOne;
  } else if (rho < 1.0) {
    c = DfrCase::RhoBelowOne;
  } else if (rho <= 2.0 + kCaseEqualityTol) {
    c = DfrCase::Linear;
  } else {
    c = DfrCase::ProjectionC;
  }
  if (require_theorem1 && (c == DfrCase::Linear || c == DfrCase::ProjectionC) && !theorem1_conditions_hold(params)) {
    throw Error(ErrorCode::UnsupportedByTheory,
                "the p = 2 bounds need gamma_i >= 1 with the second smallest gamma strictly above 1");
  }
  return c;
}

// --- Nonnegative bounds (p = 2) -------------------------------------------

/// Slope of the best L2(e^-x) linear approximation of f_hat_r on [y, inf):
///   alpha_*(y) = 1/2 [sum_{j<r} rho_j/gamma_j f_hat_j(y) + (1/gamma_r^2 - 1) f_hat_r(y)].
inline double slope_alpha_star(const GosDensity& d, double y) {
  const auto& par = d.params();
  const std::size_t r = par.rank();
  double s = 0.0;
  for (std::size_t j = 1; j < r; ++j) s += par.rho(j) / par.gamma(j) * d.f_hat(j, y);
  const double gr = par.gamma(r);
  s += (1.0 / (gr * gr) - 1.0) * d.f_hat(r, y);
  return 0.5 * s;
}

/// Left side of the equation whose smallest positive root is y*.
inline double projection_equation(const GosDensity& d, double y) {
  const auto& par = d.params();
  const std::size_t r = par.rank();
  double s = 0.0;
  for (std::size_t j = 1; j < r; ++j) s += (1.0 - 0.5 * par.rho(j)) / par.gamma(j) * d.f_hat(j, y);
  const double gr = par.gamma(r);
  s -= (gr - 1.0) * (gr - 1.0) / (2.0 * gr * gr) * d.f_hat(r, y);
  return s;
}

inline BoundResult bound_linear(const GosParams& params, const MomentSpec& moments = MomentSpec::standard(2.0)) {
  if (classify_dfr(params) != DfrCase::Linear) throw Error(ErrorCode::WrongCase, "bound_linear needs 1 < rho <= 2");
  if (moments.p != 2.0) throw Error(ErrorCode::WrongCase, "bound_linear is a p = 2 bound");
  BoundResult res;
  res.value = params.rho(1) - 1.0;
  res.bound_case = BoundCase::Linear;
  res.attainer = attainer_theorem1_linear(moments);
  return res;
}

/// C = || P f_hat - 1 || where the projection P keeps f_hat on [0, y*] and
/// continues linearly with slope alpha_*(y*).
inline BoundResult bound_projection_C(const GosParams& params, const Tolerances& tol = {},
                                      const MomentSpec& moments = MomentSpec::standard(2.0)) {
  tol.validate();
  if (classify_dfr(params, true) != DfrCase::ProjectionC) throw Error(ErrorCode::WrongCase, "bound_projection_C needs rho > 2");
  if (moments.p != 2.0) throw Error(ErrorCode::WrongCase, "bound_projection_C is a p = 2 bound");
  auto density = std::make_shared<const GosDensity>(params);
  const std::size_t r = params.rank();
  auto eq = [&](double y) { return projection_equation(*density, y); };
  const auto y_star = find_first_root(eq, 0.0, tol);
  if (!y_star) {
    throw Error(ErrorCode::RootNotFound, "no sign change of the y* equation up to " + std::to_string(tol.scan_cap));
  }
  const double y = *y_star;
  const double slope = slope_alpha_star(*density, y);
  const double f_y = density->f_hat(y);
  const QuadResult body = integrate_checked(
      [&](double x) { return density->f_hat(r, x) * density->hypoexp_density(r, x); }, 0.0, y, tol);
  const double tail = std::exp(-y) * (f_y * f_y + 2.0 * slope * f_y + 2.0 * slope * slope);
  double c2 = body.value + tail - 1.0;

  BoundResult res;
  res.bound_case = BoundCase::ProjectionC;
  res.alpha_or_y = y;
  res.diagnostics["y_star"] = y;
  res.diagnostics["y_star_residual"] = std::abs(eq(y));
  res.diagnostics["alpha_star"] = slope;
  res.diagnostics["c_squared"] = c2;
  res.diagnostics["quadrature_error"] = body.abs_error;
  if (!body.converged) res.warnings.push_back("quadrature of int_0^y* f_hat^2 e^-x did not converge");
  if (c2 < -1e-9) throw Error(ErrorCode::NegativeCSquared, "C^2 = " + std::to_string(c2));
  if (c2 <= 0.0) {
    res.warnings.push_back("C^2 = " + std::to_string(c2) + " clamped to 0");
    c2 = 0.0;
  }
  res.value = std::sqrt(c2);
  if (res.value > 0.0) res.attainer = attainer_theorem1_C(density, y, res.value, slope, moments);
  return res;
}

// --- Negative bounds (B_p family) --------------------------------------------

/// 1 - sum_j rho_j/gamma_j f_hat_j(alpha) = e^alpha / b(alpha).
inline double bp_bracket(const GosDensity& d, double alpha) {
  const auto& par = d.params();
  double s = 0.0;
  for (std::size_t j = 1; j <= par.rank(); ++j) s += par.rho(j) / par.gamma(j) * d.f_hat(j, alpha);
  return 1.0 - s;
}

/// b(alpha) = e^alpha (1 - sum_j rho_j/gamma_j f_hat_j(alpha))^-1.
inline double b_coefficient(const GosDensity& d, double alpha) {
  const double bracket = bp_bracket(d, alpha);
  if (!(bracket > 0.0)) {
    throw Error(ErrorCode::DenominatorNonpositive, "1 - sum rho_j/gamma_j f_hat_j(alpha) = " + std::to_string(bracket) +
                                                       " at alpha = " + std::to_string(alpha));
  }
  return std::exp(alpha) / bracket;
}

/// p-th power norm of the broken line (x - alpha - e^-alpha) 1{x >= alpha} - e^-alpha,
///   e^{-alpha p}(1 - e^-alpha) + int_alpha^{alpha+e^-alpha} (alpha + e^-alpha - x)^p e^-x dx
///   + int_{alpha+e^-alpha}^inf (x - e^-alpha - alpha)^p e^-x dx,
/// with both kink integrals in closed form.
inline double broken_line_moment(double p, double alpha) {
  const double eps = std::exp(-alpha);
  return std::pow(eps, p) * (1.0 - eps) + eps * std::exp(-eps) * (exp_power_integral(p, eps) + std::tgamma(p + 1.0));
}

/// B_p(alpha) = b(alpha)^-1 / broken_line_moment(p, alpha)^{1/p}, rewritten
/// without the common factor e^-alpha so that large alpha stays finite.
inline double bp_value(const GosDensity& d, double p, double alpha) {
  const double bracket = bp_bracket(d, alpha);
  if (!(bracket > 0.0)) {
    throw Error(ErrorCode::DenominatorNonpositive, "1 - sum rho_j/gamma_j f_hat_j(alpha) = " + std::to_string(bracket) +
                                                       " at alpha = " + std::to_string(alpha));
  }
  const double eps = std::exp(-alpha);
  const double reduced = std::pow(eps, p - 1.0) * (1.0 - eps) + std::exp(-eps) * (exp_power_integral(p, eps) + std::tgamma(p + 1.0));
  return std::pow(eps, 1.0 - 1.0 / p) * bracket / std::pow(reduced, 1.0 / p);
}

/// B_1(alpha) = 1/2 exp(e^-alpha) [1 - sum_j rho_j/gamma_j f_hat_j(alpha)].
inline double b1_value(const GosDensity& d, double alpha) {
  const double bracket = bp_bracket(d, alpha);
  if (!(bracket > 0.0)) {
    throw Error(ErrorCode::DenominatorNonpositive, "1 - sum rho_j/gamma_j f_hat_j(alpha) = " + std::to_string(bracket) +
                                                       " at alpha = " + std::to_string(alpha));
  }
  return 0.5 * std::exp(std::exp(-alpha)) * bracket;
}

/// lim_{alpha -> inf} B_p(alpha) when every gamma_i > 1: 1/2 for p = 1, else 0.
inline double bp_limit_at_infinity(double p) { return p == 1.0 ? 0.5 : 0.0; }

namespace detail {

inline void require_negative_regime(const GosParams& params) {
  if (!(params.min_gamma() > 1.0)) throw Error(ErrorCode::WrongCase, "negative bounds need every gamma_i > 1");
  if (!(params.rho(1) < 1.0 - kCaseEqualityTol)) throw Error(ErrorCode::WrongCase, "negative bounds need rho < 1");
}

inline BoundResult finish_negative(const GosDensity& d, const MinimizerReport& rep, double p, const MomentSpec& moments,
                                   BoundCase bound_case) {
  BoundResult res;
  res.bound_case = bound_case;
  res.value = rep.value == 0.0 ? 0.0 : -rep.value;
  res.attained_in_limit = rep.attained_in_limit;
  res.alpha_or_y = rep.argmin;
  res.diagnostics["infimum"] = rep.value;
  res.diagnostics["evaluations"] = rep.evaluations;
  if (rep.argmin) {
    const double a = *rep.argmin;
    res.diagnostics["beta0"] = std::exp(-a);
    res.attainer = attainer_prop2(a, b_coefficient(d, a), rep.value, moments);
  } else {
    res.diagnostics["beta0"] = 0.0;
  }
  (void)p;
  return res;
}

}  // namespace detail

inline BoundResult bound_negative_Bp(const GosParams& params, double p, const Tolerances& tol = {},
                                     std::optional<MomentSpec> moments = std::nullopt) {
  tol.validate();
  detail::require_negative_regime(params);
  const MomentSpec m = moments.value_or(MomentSpec::standard(p));
  m.validate();
  if (m.p != p) throw Error(ErrorCode::DomainError, "moment order mismatch");
  const GosDensity d(params);
  const auto rep = minimize_on_halfline([&](double a) { return bp_value(d, p, a); }, bp_limit_at_infinity(p), tol);
  return detail::finish_negative(d, rep, p, m, BoundCase::NegativeBp);
}

inline BoundResult bound_B1(const GosParams& params, const Tolerances& tol = {},
                            const MomentSpec& moments = MomentSpec::standard(1.0)) {
  tol.validate();
  detail::require_negative_regime(params);
  if (moments.p != 1.0) throw Error(ErrorCode::DomainError, "bound_B1 is a p = 1 bound");
  const GosDensity d(params);
  const auto rep = minimize_on_halfline([&](double a) { return b1_value(d, a); }, 0.5, tol);
  return detail::finish_negative(d, rep, 1.0, moments, BoundCase::NegativeBp);
}

// --- First gOS -------------------------------------------------------------

/// E (X^(1) - mu)/sigma_p under the sequence member with parameter a in (0,1):
///   a^{1-1/p} (a^{gamma-1}/gamma - 1) / {a^{p-1} - a^p + e^-a [int_0^a y^p e^y dy + Gamma(p+1)]}^{1/p}.
inline double first_gos_sequence(double gamma1, double p, double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0,1)");
  const double denom = std::pow(a, p - 1.0) - std::pow(a, p) + std::exp(-a) * (exp_power_integral(p, a) + std::tgamma(p + 1.0));
  return std::pow(a, 1.0 - 1.0 / p) * (std::pow(a, gamma1 - 1.0) / gamma1 - 1.0) / std::pow(denom, 1.0 / p);
}

inline BoundResult bound_first_gos(const GosParams& params, double p) {
  if (params.rank() != 1) throw Error(ErrorCode::WrongCase, "bound_first_gos needs r = 1");
  if (!(p > 1.0)) throw Error(ErrorCode::WrongCase, "bound_first_gos needs p > 1");
  const double g = params.gamma(1);
  if (g < 1.0 - kCaseEqualityTol) throw Error(ErrorCode::WrongCase, "bound_first_gos needs gamma >= 1");
  BoundResult res;
  res.value = 0.0;
  if (std::abs(g - 1.0) <= kCaseEqualityTol) {
    res.bound_case = BoundCase::ZeroExact;
    return res;
  }
  res.bound_case = BoundCase::FirstGosZero;
  res.attained_in_limit = true;
  for (double a : {1e-1, 1e-2, 1e-3}) {
    res.diagnostics["sequence_at_" + std::to_string(a).substr(0, 5)] = first_gos_sequence(g, p, a);
  }
  return res;
}

/// -inf_{0 < beta <= 1} 1/2 e^beta (1 - beta^{gamma-1}/gamma), minimized
/// directly in beta.
inline BoundResult bound_first_gos_p1(double gamma1, const Tolerances& tol = {},
                                      const MomentSpec& moments = MomentSpec::standard(1.0)) {
  tol.validate();
  if (!(gamma1 > 1.0)) throw Error(ErrorCode::WrongCase, "bound_first_gos_p1 needs gamma > 1");
  auto objective = [gamma1](double beta) { return 0.5 * std::exp(beta) * (1.0 - std::pow(beta, gamma1 - 1.0) / gamma1); };
  const UnitMinimum m = minimize_on_unit_interval(objective, 0.5, tol);
  BoundResult res;
  res.bound_case = BoundCase::FirstGosP1;
  const bool at_zero = m.t <= 0.0 || 0.5 <= m.value;
  const double inf = at_zero ? 0.5 : m.value;
  res.value = -inf;
  res.diagnostics["beta0"] = at_zero ? 0.0 : m.t;
  res.diagnostics["infimum"] = inf;
  res.diagnostics["evaluations"] = m.evaluations;
  res.attained_in_limit = at_zero;
  if (!at_zero) {
    const double a = -std::log(m.t);
    res.alpha_or_y = a;
    const double b = std::exp(a) / (1.0 - std::pow(m.t, gamma1 - 1.0) / gamma1);
    res.attainer = attainer_prop2(a, b, inf, moments);
  }
  return res;
}

// --- rho <= 1 ----------------------------------------------------------------

inline BoundResult bound_zero_cases(const GosParams& params, double p = 2.0, const Tolerances& tol = {},
                                    std::optional<MomentSpec> moments = std::nullopt) {
  const double rho = params.rho(1);
  if (rho > 1.0 + kCaseEqualityTol) throw Error(ErrorCode::WrongCase, "bound_zero_cases needs rho <= 1");
  const MomentSpec m = moments.value_or(MomentSpec::standard(p));
  if (std::abs(rho - 1.0) <= kCaseEqualityTol) {
    BoundResult res;
    res.bound_case = BoundCase::ZeroExact;
    res.value = 0.0;
    res.attainer = shifted_exponential_with_moments(m);
    return res;
  }
  if (params.min_gamma() > 1.0) return bound_negative_Bp(params, p, tol, m);
  // rho < 1 forces every gamma_i > 1, so this branch only guards against
  // parameters that slipped past that arithmetic.
  BoundResult res;
  res.bound_case = BoundCase::ZeroLimit;
  res.value = 0.0;
  res.attained_in_limit = true;
  res.strictly_negative_for_all_f = true;
  res.warnings.push_back("E X^(r) < mu for every DFR parent, but no finite negative bound is available");
  return res;
}

/// Dispatch over every DFR case covered by the theory.
inline BoundResult dfr_bound(const GosParams& params, double p, const Tolerances& tol = {},
                             std::optional<MomentSpec> moments = std::nullopt) {
  const MomentSpec m = moments.value_or(MomentSpec::standard(p));
  m.validate();
  if (params.rank() == 1) {
    const double g = params.gamma(1);
    if (g < 1.0 - kCaseEqualityTol) {
      throw Error(ErrorCode::UnsupportedByTheory, "first gOS with gamma < 1 is not covered");
    }
    if (std::abs(g - 1.0) <= kCaseEqualityTol) return bound_zero_cases(params, p, tol, m);
    if (p == 1.0) return bound_first_gos_p1(g, tol, m);
    return bound_first_gos(params, p);
  }
  switch (classify_dfr(params)) {
    case DfrCase::RhoEqOne:
    case DfrCase::RhoBelowOne:
      return bound_zero_cases(params, p, tol, m);
    case DfrCase::Linear:
    case DfrCase::ProjectionC:
      if (p != 2.0) throw Error(ErrorCode::UnsupportedByTheory, "bounds for rho > 1 exist only for p = 2");
      if (classify_dfr(params, true) == DfrCase::Linear) return bound_linear(params, m);
      return bound_projection_C(params, tol, m);
  }
  throw Error(ErrorCode::WrongCase, "unreachable");
}

}  // namespace gosbounds
