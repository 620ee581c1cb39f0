#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "gosbounds/density.hpp"
#include "gosbounds/error.hpp"
#include "gosbounds/moments.hpp"
#include "gosbounds/numerics.hpp"

namespace gosbounds {

// DFR parents used to check that no bound is exceeded. Each is given by the
// composition F^-1(V(x)), which is convex for DFR (the cumulative hazard is
// concave).

/// theta + lambda x: exponential with location theta and scale lambda.
struct ShiftedExponential {
  double theta = 0.0;
  double lambda = 1.0;
};

/// Mixture sum_i w_i Exp(rate_i); any such mixture is DFR.
struct Hyperexponential {
  std::vector<double> weights;
  std::vector<double> rates;
};

/// scale * x^{1/shape}; DFR for shape <= 1.
struct Weibull {
  double shape = 1.0;
  double scale = 1.0;
};

using DfrFamily = std::variant<ShiftedExponential, Hyperexponential, Weibull>;

class DfrDistribution {
 public:
  explicit DfrDistribution(DfrFamily family) : family_(std::move(family)) { validate(); }

  const DfrFamily& family() const { return family_; }

  std::string name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ShiftedExponential>) {
            return "shifted-exponential(theta=" + fmt(f.theta) + ",lambda=" + fmt(f.lambda) + ")";
          } else if constexpr (std::is_same_v<T, Hyperexponential>) {
            std::string s = "hyperexponential(";
            for (std::size_t i = 0; i < f.rates.size(); ++i) {
              if (i) s += ";";
              s += fmt(f.weights[i]) + "@" + fmt(f.rates[i]);
            }
            return s + ")";
          } else {
            return "weibull(shape=" + fmt(f.shape) + ",scale=" + fmt(f.scale) + ")";
          }
        },
        family_);
  }

  /// F^-1(V(x)) = F^-1(1 - e^-x).
  double composed(double x) const {
    return std::visit(
        [x](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ShiftedExponential>) {
            return f.theta + f.lambda * x;
          } else if constexpr (std::is_same_v<T, Hyperexponential>) {
            return hyperexp_inverse_hazard(f, x);
          } else {
            return f.scale * std::pow(x, 1.0 / f.shape);
          }
        },
        family_);
  }

  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::DomainError, "quantile level must lie in (0,1)");
    return composed(-std::log1p(-u));
  }

  double mean() const {
    return std::visit(
        [](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ShiftedExponential>) {
            return f.theta + f.lambda;
          } else if constexpr (std::is_same_v<T, Hyperexponential>) {
            double m = 0.0;
            for (std::size_t i = 0; i < f.rates.size(); ++i) m += f.weights[i] / f.rates[i];
            return m;
          } else {
            return f.scale * std::tgamma(1.0 + 1.0 / f.shape);
          }
        },
        family_);
  }

  /// (mu, sigma_p) of this parent, the central absolute moment by quadrature
  /// split where the composition crosses the mean.
  MomentSpec moments(double p, const Tolerances& tol = {}) const {
    const double mu = mean();
    auto g = [&](double x) { return std::pow(std::abs(composed(x) - mu), p) * std::exp(-x); };
    const double c = crossing(mu);
    const double m = integrate(g, 0.0, c, tol) + integrate(g, c, kInf, tol);
    return {p, mu, std::pow(m, 1.0 / p)};
  }

  /// E (X^(r) - mu)/sigma_p by quadrature against the density of S_r.
  double standardized_expectation(const GosDensity& density, const MomentSpec& m, const Tolerances& tol = {}) const {
    const std::size_t r = density.rank();
    auto g = [&](double x) { return (composed(x) - m.mu) / m.sigma_p * density.hypoexp_density(r, x); };
    const double c = crossing(m.mu);
    return integrate(g, 0.0, c, tol) + integrate(g, c, kInf, tol);
  }

 private:
  static std::string fmt(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  void validate() const {
    std::visit(
        [](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ShiftedExponential>) {
            if (!(f.lambda > 0.0) || !std::isfinite(f.theta)) throw Error(ErrorCode::InvalidModelParameters, "bad exponential");
          } else if constexpr (std::is_same_v<T, Hyperexponential>) {
            if (f.weights.empty() || f.weights.size() != f.rates.size()) {
              throw Error(ErrorCode::InvalidModelParameters, "hyperexponential needs matching weights and rates");
            }
            double total = 0.0;
            for (std::size_t i = 0; i < f.rates.size(); ++i) {
              if (!(f.weights[i] > 0.0) || !(f.rates[i] > 0.0)) {
                throw Error(ErrorCode::InvalidModelParameters, "hyperexponential weights and rates must be positive");
              }
              total += f.weights[i];
            }
            if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::InvalidModelParameters, "weights must sum to 1");
          } else {
            if (!(f.shape > 0.0 && f.shape <= 1.0) || !(f.scale > 0.0)) {
              throw Error(ErrorCode::InvalidModelParameters, "DFR Weibull needs 0 < shape <= 1");
            }
          }
        },
        family_);
  }

  // Solves Lambda(t) = x for the concave cumulative hazard
  // Lambda(t) = -ln sum_i w_i e^{-rate_i t}. Newton from t0 = x / Lambda'(0)
  // stays below the root and increases monotonically.
  static double hyperexp_inverse_hazard(const Hyperexponential& f, double x) {
    if (x <= 0.0) return 0.0;
    const double rmin = *std::min_element(f.rates.begin(), f.rates.end());
    auto log_survival_and_hazard = [&](double t, double& hazard) {
      double s = 0.0, ds = 0.0;
      for (std::size_t i = 0; i < f.rates.size(); ++i) {
        const double e = f.weights[i] * std::exp(-(f.rates[i] - rmin) * t);
        s += e;
        ds += f.rates[i] * e;
      }
      hazard = ds / s;
      return -rmin * t + std::log(s);
    };
    double h0 = 0.0;
    for (std::size_t i = 0; i < f.rates.size(); ++i) h0 += f.weights[i] * f.rates[i];
    double t = x / h0;
    for (int it = 0; it < 200; ++it) {
      double hazard = 0.0;
      const double phi = -log_survival_and_hazard(t, hazard) - x;
      const double step = -phi / hazard;
      t += step;
      if (std::abs(step) <= 1e-12 * std::max(1.0, t)) break;
    }
    return t;
  }

  double crossing(double level) const {
    if (composed(0.0) >= level) return 0.0;
    double hi = 1.0;
    while (composed(hi) < level) hi *= 2.0;
    return find_root([&](double x) { return composed(x) - level; }, 0.0, hi, Tolerances{});
  }

  DfrFamily family_;
};

/// Fixed DFR zoo: 5 shifted exponentials, 5 hyperexponential mixtures and
/// 3 Weibulls with shape below 1.
inline std::vector<DfrDistribution> standard_dfr_zoo() {
  std::vector<DfrDistribution> z;
  for (auto [theta, lambda] : std::vector<std::pair<double, double>>{{0, 1}, {1, 2}, {-3, 0.5}, {10, 4}, {0.25, 0.1}}) {
    z.emplace_back(ShiftedExponential{theta, lambda});
  }
  z.emplace_back(Hyperexponential{{0.5, 0.5}, {1.0, 3.0}});
  z.emplace_back(Hyperexponential{{0.9, 0.1}, {2.0, 0.2}});
  z.emplace_back(Hyperexponential{{0.2, 0.8}, {0.5, 5.0}});
  z.emplace_back(Hyperexponential{{0.3, 0.3, 0.4}, {1.0, 4.0, 16.0}});
  z.emplace_back(Hyperexponential{{0.99, 0.01}, {1.0, 0.01}});
  for (auto [k, s] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {0.7, 2.0}, {0.9, 0.5}}) z.emplace_back(Weibull{k, s});
  return z;
}

}  // namespace gosbounds
