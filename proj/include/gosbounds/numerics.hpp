#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gosbounds/error.hpp"

namespace gosbounds {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance contract shared by every numerical routine.
struct Tolerances {
  double quad_rel = 1e-10;   ///< relative error target of integrate()
  double quad_abs = 1e-15;   ///< absolute floor, used when the integral is ~0
  double root_abs = 1e-12;   ///< final bracket half-width of find_root()
  double min_abs_x = 1e-8;   ///< golden-section bracket width (in t = e^-alpha)
  double min_abs_f = 1e-10;  ///< slack when comparing minimizer candidates
  int grid_points = 512;     ///< grid size of the half-line minimizer
  int max_subdivisions = 4000;
  double scan_step = 1.0 / 64.0;  ///< step of smallest-root scans
  double scan_cap = 50.0;         ///< scans give up beyond this abscissa

  void validate() const {
    if (!(quad_rel > 0) || !(quad_abs > 0) || !(root_abs > 0) || !(min_abs_x > 0) || !(min_abs_f > 0) ||
        !(scan_step > 0) || !(scan_cap > 0) || max_subdivisions < 1) {
      throw Error(ErrorCode::InvalidTolerances, "all tolerances must be strictly positive");
    }
    if (grid_points < 16) throw Error(ErrorCode::InvalidTolerances, "grid_points must be >= 16");
  }

  /// Named presets: "default", "strict" or "fast".
  static Tolerances profile(std::string_view name) {
    Tolerances t;
    if (name == "default" || name.empty()) return t;
    if (name == "strict") {
      t.quad_rel = 1e-12;
      t.root_abs = 1e-14;
      t.min_abs_x = 1e-10;
      t.grid_points = 2048;
      t.max_subdivisions = 20000;
      return t;
    }
    if (name == "fast") {
      t.quad_rel = 1e-8;
      t.root_abs = 1e-10;
      t.min_abs_x = 1e-6;
      t.grid_points = 128;
      return t;
    }
    throw Error(ErrorCode::InvalidTolerances, "unknown tolerance profile '" + std::string(name) + "'");
  }
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[static_cast<std::size_t>(i)];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(i)] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
QuadResult adaptive_finite(F&& f, double a, double b, const Tolerances& tol) {
  int evals = 0;
  auto counted = [&](double x) {
    ++evals;
    return f(x);
  };
  std::vector<Panel> panels{gauss_kronrod_15(counted, a, b)};
  auto by_error = [](const Panel& l, const Panel& r) { return l.error < r.error; };
  for (int iter = 0;; ++iter) {
    double total = 0.0, err = 0.0;
    for (const auto& p : panels) {
      total += p.value;
      err += p.error;
    }
    if (!std::isfinite(total)) return {total, err, evals, false};
    if (err <= std::max(tol.quad_rel * std::abs(total), tol.quad_abs)) return {total, err, evals, true};
    if (iter >= tol.max_subdivisions) return {total, err, evals, false};
    std::pop_heap(panels.begin(), panels.end(), by_error);
    const Panel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) return {total, err, evals, false};
    panels.push_back(gauss_kronrod_15(counted, worst.a, mid));
    std::push_heap(panels.begin(), panels.end(), by_error);
    panels.push_back(gauss_kronrod_15(counted, mid, worst.b));
    std::push_heap(panels.begin(), panels.end(), by_error);
  }
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a, b]; b may be +infinity,
/// in which case x = a + (1 - t)/t maps the half-line onto t in (0, 1].
/// Non-convergence is reported through QuadResult::converged.
template <class F>
QuadResult integrate_checked(F&& f, double a, double b, const Tolerances& tol = {}) {
  if (a == b) return {0.0, 0.0, 0, true};
  if (std::isinf(b)) {
    auto mapped = [&](double t) {
      const double x = a + (1.0 - t) / t;
      return f(x) / (t * t);
    };
    return detail::adaptive_finite(mapped, 0.0, 1.0, tol);
  }
  if (b < a) {
    QuadResult res = detail::adaptive_finite(f, b, a, tol);
    res.value = -res.value;
    return res;
  }
  return detail::adaptive_finite(f, a, b, tol);
}

/// Best estimate of the integral; see integrate_checked() for the flag.
template <class F>
double integrate(F&& f, double a, double b, const Tolerances& tol = {}) {
  return integrate_checked(std::forward<F>(f), a, b, tol).value;
}

/// Brent's method on a bracket with a sign change.
template <class F>
double find_root(F&& f, double lo, double hi, const Tolerances& tol = {}) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorCode::NoSignChange,
                "no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  double c = b, fc = fb, d = 0.0, e = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol.root_abs;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  return b;
}

/// Smallest root of f on (start, cap]: walk a grid of the given step until
/// the sign changes, then refine that bracket. nullopt when the cap is hit.
template <class F>
std::optional<double> find_first_root(F&& f, double start, const Tolerances& tol = {}) {
  double x_prev = start;
  double f_prev = f(x_prev);
  for (int k = 1;; ++k) {
    const double x = start + k * tol.scan_step;
    if (x > start + tol.scan_cap) return std::nullopt;
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (f_prev != 0.0 && (f_prev > 0.0) != (fx > 0.0)) return find_root(f, x_prev, x, tol);
    x_prev = x;
    f_prev = fx;
  }
}

/// Golden-section search for a minimum inside [a, b] (endpoints not evaluated).
template <class F>
std::pair<double, double> golden_section(F&& f, double a, double b, double x_tol, int* evaluations = nullptr) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (std::abs(b - a) > x_tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  if (evaluations) *evaluations += evals;
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct UnitMinimum {
  double t = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Minimum of g on [0, 1] where g(0) is supplied separately (typically a
/// limit the function cannot evaluate directly). Uniform grid followed by a
/// golden-section refinement of the best bracket. Ties on the grid resolve
/// to the largest t.
template <class F>
UnitMinimum minimize_on_unit_interval(F&& g, double value_at_zero, const Tolerances& tol = {}) {
  tol.validate();
  const int n = tol.grid_points;
  std::vector<double> values(static_cast<std::size_t>(n));
  values[0] = value_at_zero;
  for (int i = 1; i < n; ++i) values[static_cast<std::size_t>(i)] = g(static_cast<double>(i) / (n - 1));
  int best = n - 1;
  for (int i = n - 2; i >= 0; --i) {
    if (values[static_cast<std::size_t>(i)] < values[static_cast<std::size_t>(best)]) best = i;
  }
  UnitMinimum out{static_cast<double>(best) / (n - 1), values[static_cast<std::size_t>(best)], n - 1};
  const double lo = static_cast<double>(std::max(best - 1, 0)) / (n - 1);
  const double hi = static_cast<double>(std::min(best + 1, n - 1)) / (n - 1);
  auto [t, v] = golden_section(g, lo, hi, tol.min_abs_x, &out.evaluations);
  if (v < out.value) {
    out.t = t;
    out.value = v;
  }
  return out;
}

/// Outcome of minimize_on_halfline(); argmin is empty when the infimum is the
/// limit at +infinity.
struct MinimizerReport {
  std::optional<double> argmin;
  double value = 0.0;
  bool attained_in_limit = false;
  int evaluations = 0;

  bool at_infinity() const { return !argmin.has_value(); }
};

/// Infimum over alpha in [0, inf) of f, given its limit at infinity.
/// The search runs in t = e^-alpha so the whole half-line maps onto (0, 1].
template <class F>
MinimizerReport minimize_on_halfline(F&& f, double limit_at_infinity, const Tolerances& tol = {}) {
  auto g = [&](double t) { return f(-std::log(t)); };
  const UnitMinimum m = minimize_on_unit_interval(g, limit_at_infinity, tol);
  MinimizerReport report;
  report.evaluations = m.evaluations;
  if (m.t <= 0.0 || limit_at_infinity <= m.value) {
    report.value = limit_at_infinity;
    report.attained_in_limit = true;
  } else {
    report.argmin = -std::log(m.t);
    report.value = m.value;
  }
  return report;
}

}  // namespace gosbounds
