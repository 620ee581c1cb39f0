#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gosbounds/error.hpp"
#include "gosbounds/extremal.hpp"
#include "gosbounds/moments.hpp"
#include "gosbounds/params.hpp"

namespace gosbounds {

/// Two equivalent ways to draw U^(r): 1 - prod B_i with B_i = U_i^{1/gamma_i}
/// ~ Beta(gamma_i, 1), or 1 - exp(-sum V_i / gamma_i).
enum class SamplingRoute { ExponentialSum, BetaProduct };

constexpr std::string_view to_string(SamplingRoute r) {
  return r == SamplingRoute::ExponentialSum ? "exponential-sum" : "beta-product";
}

struct EstimateWithCI {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  SamplingRoute route = SamplingRoute::ExponentialSum;

  double ci95_lo() const { return mean - 1.96 * std_error; }
  double ci95_hi() const { return mean + 1.96 * std_error; }
};

/// Samples per independently seeded chunk. Work is split on chunk boundaries
/// only, so results do not depend on the number of threads.
inline constexpr std::int64_t kChunkSize = 65536;

namespace detail {

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk, SamplingRoute route) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                    static_cast<std::uint32_t>(route)};
  return std::mt19937_64(seq);
}

/// Uniform on the open interval (0,1), midpoints of a 2^-53 grid.
inline double open_uniform(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

// Running mean and sum of squared deviations.
struct Moments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

inline int worker_count(int requested, std::int64_t chunks) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(1, t);
  return static_cast<int>(std::min<std::int64_t>(t, chunks));
}

template <class Body>
void for_each_chunk(std::int64_t chunks, int threads, Body&& body) {
  const int workers = worker_count(threads, chunks);
  if (workers <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t c = w; c < chunks; c += workers) body(c);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Draws the exponential argument S = V^-1(U^(r)) = sum_i V_i / gamma_i.
class GosSampler {
 public:
  GosSampler(const GosParams& params, SamplingRoute route) : route_(route) {
    for (double g : params.gamma()) inv_gamma_.push_back(1.0 / g);
  }

  double draw_exponential_argument(std::mt19937_64& eng) const {
    double s = 0.0;
    if (route_ == SamplingRoute::ExponentialSum) {
      for (double w : inv_gamma_) s += -std::log1p(-detail::open_uniform(eng)) * w;
      return s;
    }
    double log_prod = 0.0;
    for (double w : inv_gamma_) log_prod += std::log(std::pow(detail::open_uniform(eng), w));
    return -log_prod;
  }

  double draw_uniform(std::mt19937_64& eng) const { return -std::expm1(-draw_exponential_argument(eng)); }

  SamplingRoute route() const { return route_; }

 private:
  SamplingRoute route_;
  std::vector<double> inv_gamma_;
};

/// n copies of S = V^-1(U^(r)), chunk-seeded from `seed`.
inline std::vector<double> sample_exponential_argument(const GosParams& params, std::int64_t n, std::uint64_t seed,
                                                       SamplingRoute route = SamplingRoute::ExponentialSum) {
  if (n < 1) throw Error(ErrorCode::DomainError, "sample size must be positive");
  const GosSampler sampler(params, route);
  std::vector<double> out(static_cast<std::size_t>(n));
  const std::int64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  for (std::int64_t c = 0; c < chunks; ++c) {
    auto eng = detail::chunk_engine(seed, static_cast<std::uint64_t>(c), route);
    const std::int64_t end = std::min(n, (c + 1) * kChunkSize);
    for (std::int64_t i = c * kChunkSize; i < end; ++i) out[static_cast<std::size_t>(i)] = sampler.draw_exponential_argument(eng);
  }
  return out;
}

/// n copies of U^(r) on (0,1).
inline std::vector<double> sample_uniform_gos(const GosParams& params, std::int64_t n, std::uint64_t seed,
                                              SamplingRoute route = SamplingRoute::ExponentialSum) {
  auto xs = sample_exponential_argument(params, n, seed, route);
  for (double& x : xs) x = -std::expm1(-x);
  return xs;
}

/// Monte Carlo estimate of E (g(S) - mu)/sigma_p with g = F^-1 o V given on
/// the exponential scale; working in x keeps full precision deep in the
/// upper tail, where u = 1 - e^-x rounds to 1.
template <class Composed>
EstimateWithCI estimate_standardized_expectation_x(const GosParams& params, Composed&& composed, const MomentSpec& moments,
                                                   std::int64_t n, std::uint64_t seed,
                                                   SamplingRoute route = SamplingRoute::ExponentialSum, int threads = 0) {
  moments.validate();
  if (n < 2) throw Error(ErrorCode::DomainError, "need at least two samples");
  const GosSampler sampler(params, route);
  const std::int64_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<detail::Moments> partial(static_cast<std::size_t>(chunks));
  detail::for_each_chunk(chunks, threads, [&](std::int64_t c) {
    auto eng = detail::chunk_engine(seed, static_cast<std::uint64_t>(c), route);
    const std::int64_t count = std::min(n, (c + 1) * kChunkSize) - c * kChunkSize;
    detail::Moments acc;
    for (std::int64_t i = 0; i < count; ++i) {
      const double x = sampler.draw_exponential_argument(eng);
      const double v = (composed(x) - moments.mu) / moments.sigma_p;
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteSample, "non-finite quantile value at x = " + std::to_string(x));
      }
      acc.add(v);
    }
    partial[static_cast<std::size_t>(c)] = acc;
  });
  detail::Moments total;
  for (const auto& p : partial) total.merge(p);
  EstimateWithCI est;
  est.mean = total.mean;
  est.std_error = std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n));
  est.n_samples = total.n;
  est.seed = seed;
  est.route = route;
  return est;
}

/// Same estimate for a quantile function given on (0,1).
inline EstimateWithCI estimate_standardized_expectation(const GosParams& params, const std::function<double(double)>& quantile_fn,
                                                        const MomentSpec& moments, std::int64_t n, std::uint64_t seed,
                                                        SamplingRoute route = SamplingRoute::ExponentialSum, int threads = 0) {
  return estimate_standardized_expectation_x(
      params, [&](double x) { return quantile_fn(-std::expm1(-x)); }, moments, n, seed, route, threads);
}

inline EstimateWithCI estimate_standardized_expectation(const GosParams& params, const ExtremalDistribution& dist,
                                                        std::int64_t n, std::uint64_t seed,
                                                        SamplingRoute route = SamplingRoute::ExponentialSum, int threads = 0) {
  return estimate_standardized_expectation_x(
      params, [&](double x) { return dist.composed(x); }, dist.moments(), n, seed, route, threads);
}

// --- Kolmogorov-Smirnov helpers ---------------------------------------------

/// sup_t |F_n(t) - F(t)|.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// sup_t |F_n(t) - G_m(t)|.
inline double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  return d;
}

/// Asymptotic 1% critical value of the Kolmogorov distribution.
inline constexpr double kKsCoefficient1Percent = 1.6276;

inline double ks_critical_1pct(std::size_t n) { return kKsCoefficient1Percent / std::sqrt(static_cast<double>(n)); }

inline double ks_two_sample_critical_1pct(std::size_t n, std::size_t m) {
  const double a = static_cast<double>(n), b = static_cast<double>(m);
  return kKsCoefficient1Percent * std::sqrt((a + b) / (a * b));
}

}  // namespace gosbounds
