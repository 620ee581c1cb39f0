#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "gosbounds/density.hpp"
#include "gosbounds/dfr_bounds.hpp"
#include "gosbounds/error.hpp"
#include "gosbounds/extremal.hpp"
#include "gosbounds/moments.hpp"
#include "gosbounds/numerics.hpp"
#include "gosbounds/params.hpp"

namespace gosbounds {

/// Root of alpha = (alpha + 1) e^-alpha on (0, inf), where the kink point of
/// the DFRA extremal function meets alpha. Solved once.
inline double alpha0() {
  static const double root = find_root([](double a) { return a - (a + 1.0) * std::exp(-a); }, 0.1, 2.0, Tolerances{});
  return root;
}

/// Which density enters the admissibility sum: f_hat_{gamma,j} inside the
/// j-sum (default), or f_hat_{gamma,r} as printed.
enum class ConditionReading { PerRank, LiteralR };

struct DfraDiagnostics {
  double theta_hat = 0.0;  ///< smallest inflection point of f_hat_r
  double beta_hat = 0.0;   ///< root of f_hat_r(beta) = 1 in (0, theta_hat)
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;
  bool condition_holds = false;
  double alpha0 = 0.0;
  ConditionReading reading = ConditionReading::PerRank;
};

inline DfraDiagnostics dfra_admissible(const GosParams& params, const Tolerances& tol = {},
                                       ConditionReading reading = ConditionReading::PerRank) {
  tol.validate();
  if (params.rank() < 2) throw Error(ErrorCode::WrongCase, "the DFRA bound needs r >= 2");
  const GosDensity d(params);
  const std::size_t r = params.rank();
  DfraDiagnostics out;
  out.alpha0 = alpha0();
  out.reading = reading;

  // f_hat_r vanishes at 0 with f_hat_r'' possibly zero there as well, so the
  // scan starts one step in.
  auto second = [&](double x) { return d.f_hat(r, x, 2); };
  const auto theta = find_first_root(second, tol.scan_step, tol);
  if (!theta) throw Error(ErrorCode::NoInflectionPoint, "f_hat_r'' keeps its sign up to " + std::to_string(tol.scan_cap));
  out.theta_hat = *theta;

  auto level = [&](double x) { return d.f_hat(r, x) - 1.0; };
  const double lo = 0.0, hi = out.theta_hat;
  if (!(level(lo) < 0.0 && level(hi) > 0.0)) {
    throw Error(ErrorCode::NoBetaHat, "f_hat_r - 1 has no sign change on (0, theta_hat)");
  }
  out.beta_hat = find_root(level, lo, hi, tol);

  const double b = out.beta_hat;
  double lhs = 0.0;
  for (std::size_t j = 1; j <= r; ++j) {
    const double f = reading == ConditionReading::PerRank ? d.f_hat(j, b) : d.f_hat(r, b);
    lhs += (params.rho(j) + b) / params.gamma(j) * f;
  }
  out.condition_lhs = lhs;
  out.condition_rhs = 1.0 + b;
  out.condition_holds = lhs <= out.condition_rhs;
  return out;
}

/// sum_j f_hat_j(alpha)(alpha + rho_j)/gamma_j - alpha - 1 = -e^alpha / b_alpha.
inline double dfra_bracket(const GosDensity& d, double alpha) {
  const auto& par = d.params();
  double s = 0.0;
  for (std::size_t j = 1; j <= par.rank(); ++j) s += d.f_hat(j, alpha) * (alpha + par.rho(j)) / par.gamma(j);
  return s - alpha - 1.0;
}

inline double b_alpha(const GosDensity& d, double alpha) {
  const double bracket = dfra_bracket(d, alpha);
  if (!(bracket < 0.0)) {
    throw Error(ErrorCode::DenominatorNonpositive,
                "b_alpha bracket = " + std::to_string(bracket) + " >= 0 at alpha = " + std::to_string(alpha));
  }
  return -std::exp(alpha) / bracket;
}

/// e^alpha times the p-th absolute moment of -kappa 1{x < alpha} + (x - kappa) 1{x >= alpha},
/// kappa = (alpha + 1) e^-alpha. The kink kappa lies above alpha exactly on
/// the low branch alpha < alpha0.
inline double dfra_reduced_moment(double p, double alpha, bool low_branch, const Tolerances& tol = {}) {
  const double kappa = (alpha + 1.0) * std::exp(-alpha);
  const double head = std::pow(alpha + 1.0, p) * std::exp(-alpha * (p - 1.0)) * (-std::expm1(-alpha));
  if (low_branch) {
    return head + std::exp(alpha - kappa) * (exp_power_integral(p, std::max(0.0, kappa - alpha)) + std::tgamma(p + 1.0));
  }
  return head + shifted_gamma_integral(p, std::max(0.0, alpha - kappa), tol);
}

inline double bstar_low(const GosDensity& d, double p, double alpha, const Tolerances& tol = {}) {
  const double bracket = dfra_bracket(d, alpha);
  if (!(bracket < 0.0)) {
    throw Error(ErrorCode::DenominatorNonpositive,
                "b_alpha bracket = " + std::to_string(bracket) + " >= 0 at alpha = " + std::to_string(alpha));
  }
  return -bracket * std::exp(-alpha * (1.0 - 1.0 / p)) / std::pow(dfra_reduced_moment(p, alpha, true, tol), 1.0 / p);
}

inline double bstar_high(const GosDensity& d, double p, double alpha, const Tolerances& tol = {}) {
  const double bracket = dfra_bracket(d, alpha);
  if (!(bracket < 0.0)) {
    throw Error(ErrorCode::DenominatorNonpositive,
                "b_alpha bracket = " + std::to_string(bracket) + " >= 0 at alpha = " + std::to_string(alpha));
  }
  return -bracket * std::exp(-alpha * (1.0 - 1.0 / p)) / std::pow(dfra_reduced_moment(p, alpha, false, tol), 1.0 / p);
}

/// B*_p(alpha) on the branch selected by alpha0, after checking that the
/// kink ordering agrees with that branch.
inline double bstar_value(const GosDensity& d, double p, double alpha, const Tolerances& tol = {}) {
  if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must be nonnegative");
  const double kappa = (alpha + 1.0) * std::exp(-alpha);
  const bool low = alpha < alpha0();
  // Within a few ulps of alpha0 the two orderings are numerically equal and
  // the two forms coincide, so only clear disagreements are errors.
  if (low != (alpha < kappa) && std::abs(alpha - kappa) > 1e-12) {
    throw Error(ErrorCode::DomainError, "kink ordering disagrees with the branch at alpha = " + std::to_string(alpha));
  }
  return low ? bstar_low(d, p, alpha, tol) : bstar_high(d, p, alpha, tol);
}

/// lim B*_p(alpha) as alpha -> inf when every gamma_i > 1: 1/2 for p = 1, 0 otherwise.
inline double bstar_limit_at_infinity(double p) { return p == 1.0 ? 0.5 : 0.0; }

inline BoundResult bound_dfra(const GosParams& params, double p, const Tolerances& tol = {},
                              std::optional<MomentSpec> moments = std::nullopt,
                              ConditionReading reading = ConditionReading::PerRank) {
  const MomentSpec m = moments.value_or(MomentSpec::standard(p));
  m.validate();
  if (m.p != p) throw Error(ErrorCode::DomainError, "moment order mismatch");
  const DfraDiagnostics diag = dfra_admissible(params, tol, reading);
  BoundResult res;
  res.bound_case = BoundCase::DfraNegative;
  res.diagnostics["theta_hat"] = diag.theta_hat;
  res.diagnostics["beta_hat"] = diag.beta_hat;
  res.diagnostics["condition_lhs"] = diag.condition_lhs;
  res.diagnostics["condition_rhs"] = diag.condition_rhs;
  res.diagnostics["alpha0"] = diag.alpha0;
  if (!diag.condition_holds) {
    throw Error(ErrorCode::ConditionFails, "admissibility condition fails: " + std::to_string(diag.condition_lhs) +
                                               " > " + std::to_string(diag.condition_rhs));
  }
  const GosDensity d(params);
  const auto rep = minimize_on_halfline([&](double a) { return bstar_value(d, p, a, tol); }, bstar_limit_at_infinity(p), tol);
  res.value = rep.value == 0.0 ? 0.0 : -rep.value;
  res.attained_in_limit = rep.attained_in_limit;
  res.alpha_or_y = rep.argmin;
  res.diagnostics["infimum"] = rep.value;
  res.diagnostics["evaluations"] = rep.evaluations;
  if (rep.argmin && *rep.argmin > 0.0) {
    const double a = *rep.argmin;
    res.attainer = attainer_dfra(a, b_alpha(d, a), rep.value, m);
  }
  return res;
}

}  // namespace gosbounds
