#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gosbounds/density.hpp"
#include "gosbounds/error.hpp"
#include "gosbounds/moments.hpp"
#include "gosbounds/numerics.hpp"

namespace gosbounds {

// Shapes of a quantile segment, written in the exponential argument
// x = -ln(1 - u), i.e. as pieces of the composition F^-1(V(x)).

/// Constant quantile: an atom whose mass is the u-length of the segment.
struct Atom {
  double value = 0.0;
};

/// Shifted exponential part: location + scale (x - onset_x).
struct ExponentialTail {
  double location = 0.0;
  double scale = 1.0;
  double onset_x = 0.0;
};

/// intercept + slope x.
struct AffineInExponentialArgument {
  double slope = 0.0;
  double intercept = 0.0;
};

/// shift + scale f_{gamma,r}(u), the inverse of the cdf branch
/// F(t) = f_{gamma,r}^{-1}((t - shift)/scale).
struct InverseDensitySegment {
  std::shared_ptr<const GosDensity> density;
  double scale = 1.0;
  double shift = 0.0;
};

using PieceShape = std::variant<Atom, ExponentialTail, AffineInExponentialArgument, InverseDensitySegment>;

struct QuantilePiece {
  double x_lo = 0.0;
  double x_hi = kInf;
  PieceShape shape;

  double u_lo() const { return -std::expm1(-x_lo); }
  double u_hi() const { return std::isinf(x_hi) ? 1.0 : -std::expm1(-x_hi); }

  double at(double x) const {
    return std::visit(
        [x](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Atom>) {
            return s.value;
          } else if constexpr (std::is_same_v<S, ExponentialTail>) {
            return s.location + s.scale * (x - s.onset_x);
          } else if constexpr (std::is_same_v<S, AffineInExponentialArgument>) {
            return s.intercept + s.slope * x;
          } else {
            return s.shift + s.scale * s.density->f_hat(x);
          }
        },
        shape);
  }
};

/// Bound-attaining parent distribution stored as a piecewise quantile
/// function over consecutive x-intervals covering [0, inf).
class ExtremalDistribution {
 public:
  ExtremalDistribution(std::vector<QuantilePiece> pieces, MomentSpec moments, std::string label)
      : pieces_(std::move(pieces)), moments_(moments), label_(std::move(label)) {}

  const std::vector<QuantilePiece>& pieces() const { return pieces_; }
  const MomentSpec& moments() const { return moments_; }
  const std::string& label() const { return label_; }

  /// F^-1(V(x)) for x >= 0.
  double composed(double x) const {
    for (const auto& piece : pieces_) {
      if (x < piece.x_hi) return piece.at(x);
    }
    return pieces_.back().at(x);
  }

  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::DomainError, "quantile level must lie in (0,1)");
    return composed(-std::log1p(-u));
  }

  /// F(t) = sup{u : Q(u) <= t}, by bisection on the monotone composition.
  double cdf(double t) const {
    if (t < composed(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (composed(hi) <= t) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) return 1.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
      const double mid = 0.5 * (lo + hi);
      (composed(mid) <= t ? lo : hi) = mid;
    }
    return -std::expm1(-lo);
  }

  /// Mean of the parent: int_0^inf F^-1(V(x)) e^-x dx.
  double mean(const Tolerances& tol = {}) const {
    return integrate_pieces([&](double x) { return composed(x) * std::exp(-x); }, tol);
  }

  /// E|X - mu_target|^p, splitting at the point where the quantile crosses mu.
  double central_abs_moment(const Tolerances& tol = {}) const {
    const double mu = moments_.mu, p = moments_.p;
    return integrate_pieces([&](double x) { return std::pow(std::abs(composed(x) - mu), p) * std::exp(-x); }, tol,
                            crossing(mu));
  }

  /// E (X^(r) - mu)/sigma_p under this parent, by quadrature against the
  /// density of the hypoexponential sum S_r.
  double standardized_expectation(const GosDensity& density, const Tolerances& tol = {}) const {
    const std::size_t r = density.rank();
    const double mu = moments_.mu, s = moments_.sigma_p;
    return integrate_pieces([&](double x) { return (composed(x) - mu) / s * density.hypoexp_density(r, x); }, tol);
  }

  /// Smallest x with composed(x) >= level, or nullopt.
  std::optional<double> crossing(double level) const {
    if (composed(0.0) >= level) return std::nullopt;
    double lo = 0.0, hi = 1.0;
    while (composed(hi) < level) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) return std::nullopt;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
      const double mid = 0.5 * (lo + hi);
      (composed(mid) < level ? lo : hi) = mid;
    }
    return hi;
  }

  /// Nondecreasing on a grid of the given x-values.
  bool nondecreasing_on(const std::vector<double>& xs) const {
    double prev = -kInf;
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    for (double x : sorted) {
      const double v = composed(x);
      if (v < prev) return false;
      prev = v;
    }
    return true;
  }

 private:
  template <class F>
  double integrate_pieces(F&& f, const Tolerances& tol, std::optional<double> extra_break = std::nullopt) const {
    std::vector<double> breaks{0.0};
    for (const auto& piece : pieces_) {
      if (std::isfinite(piece.x_hi)) breaks.push_back(piece.x_hi);
    }
    if (extra_break) breaks.push_back(*extra_break);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      const double b = i + 1 < breaks.size() ? breaks[i + 1] : kInf;
      total += integrate(f, breaks[i], b, tol);
    }
    return total;
  }

  std::vector<QuantilePiece> pieces_;
  MomentSpec moments_;
  std::string label_;
};

inline void require_positive_finite(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidCoefficients, std::string(what) + " must be positive and finite");
  }
}

/// Atom at c2 = mu - e^-alpha0 c1 with mass 1 - e^-alpha0, followed by a
/// shifted exponential of scale c1 = b B sigma_p.
inline ExtremalDistribution attainer_prop2(double alpha0, double b_val, double bp_val, const MomentSpec& moments) {
  moments.validate();
  if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) throw Error(ErrorCode::InvalidCoefficients, "alpha0 must be finite and >= 0");
  require_positive_finite(b_val, "b(alpha0)");
  require_positive_finite(bp_val, "B_p(alpha0)");
  const double c1 = b_val * bp_val * moments.sigma_p;
  const double c2 = moments.mu - std::exp(-alpha0) * c1;
  std::vector<QuantilePiece> pieces;
  if (alpha0 > 0.0) pieces.push_back({0.0, alpha0, Atom{c2}});
  pieces.push_back({alpha0, kInf, ExponentialTail{c2, c1, alpha0}});
  return ExtremalDistribution(std::move(pieces), moments, "atom+exponential");
}

/// Shifted exponential with location mu - sigma_2 and scale sigma_2.
inline ExtremalDistribution attainer_theorem1_linear(const MomentSpec& moments) {
  moments.validate();
  if (moments.p != 2.0) throw Error(ErrorCode::WrongCase, "the linear-case attainer is defined for p = 2");
  return ExtremalDistribution({{0.0, kInf, ExponentialTail{moments.mu - moments.sigma_p, moments.sigma_p, 0.0}}}, moments,
                              "shifted exponential");
}

/// Exponential distribution with the requested mean and p-th central
/// absolute moment.
inline ExtremalDistribution shifted_exponential_with_moments(const MomentSpec& moments) {
  moments.validate();
  const double scale = moments.sigma_p / std::pow(exponential_central_abs_moment(moments.p), 1.0 / moments.p);
  return ExtremalDistribution({{0.0, kInf, ExponentialTail{moments.mu - scale, scale, 0.0}}}, moments,
                              "shifted exponential");
}

/// Three-piece attainer of the projection bound C: no atom, the density
/// branch on (0, V(y*)) and an exponential-argument tail of slope alpha_*(y*).
inline ExtremalDistribution attainer_theorem1_C(std::shared_ptr<const GosDensity> density, double y_star, double c_bound,
                                                double slope_at_y, const MomentSpec& moments) {
  moments.validate();
  require_positive_finite(c_bound, "C");
  require_positive_finite(y_star, "y*");
  // The middle piece inverts f_{gamma,r}, so the density must be increasing
  // on [0, y*].
  const int checks = 256;
  for (int i = 0; i <= checks; ++i) {
    const double x = y_star * i / checks;
    if (density->f_hat(density->rank(), x, 1) < -1e-12) {
      throw Error(ErrorCode::NonMonotoneBranch,
                  "f_gamma,r is decreasing at x = " + std::to_string(x) + " < y* = " + std::to_string(y_star));
    }
  }
  const double s = moments.sigma_p / c_bound;
  const double f_y = density->f_hat(y_star);
  std::vector<QuantilePiece> pieces;
  pieces.push_back({0.0, y_star, InverseDensitySegment{density, s, moments.mu - s}});
  pieces.push_back({y_star, kInf, AffineInExponentialArgument{s * slope_at_y, moments.mu + s * (f_y - slope_at_y * y_star - 1.0)}});
  return ExtremalDistribution(std::move(pieces), moments, "projection three-piece");
}

/// Member of the first-gOS approximating sequence: atom at
/// mu - sigma_p a / N_p(a) with mass 1 - a, exponential of scale sigma_p / N_p(a).
inline ExtremalDistribution attainer_prop3(double gamma1, double p, double a, const MomentSpec& moments) {
  moments.validate();
  if (!(gamma1 >= 1.0)) throw Error(ErrorCode::WrongCase, "first-gOS attainers need gamma >= 1");
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0,1)");
  const double n = normalizer_np(p, a);
  const double scale = moments.sigma_p / n;
  const double atom = moments.mu - scale * a;
  const double onset = -std::log(a);
  return ExtremalDistribution({{0.0, onset, Atom{atom}}, {onset, kInf, ExponentialTail{atom, scale, onset}}}, moments,
                              "first-gOS sequence member");
}

/// DFRA attainer: constant mu - b kappa B* sigma_p below alpha_*, then
/// mu + (x - kappa) b B* sigma_p, kappa = (alpha_* + 1) e^-alpha_*.
inline ExtremalDistribution attainer_dfra(double alpha_star, double b_val, double bstar_val, const MomentSpec& moments) {
  moments.validate();
  require_positive_finite(alpha_star, "alpha_*");
  require_positive_finite(b_val, "b_alpha");
  require_positive_finite(bstar_val, "B*_p(alpha_*)");
  const double kappa = (alpha_star + 1.0) * std::exp(-alpha_star);
  const double c = b_val * bstar_val * moments.sigma_p;
  return ExtremalDistribution({{0.0, alpha_star, Atom{moments.mu - c * kappa}},
                               {alpha_star, kInf, AffineInExponentialArgument{c, moments.mu - c * kappa}}},
                              moments, "DFRA atom+jump+linear");
}

inline double quantile(const ExtremalDistribution& dist, double u) { return dist.quantile(u); }

}  // namespace gosbounds
