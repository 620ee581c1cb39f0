// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [--samples N] [--known-fail i,j,...]
// Exit status is 0 when every failing criterion is listed in --known-fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "gosbounds/gosbounds.hpp"
#include "oracles.hpp"

using namespace gosbounds;

namespace {

std::int64_t g_samples = 1000000;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Independent density of S_r: distinct-rate partial fractions.
double oracle_density(const GosParams& p, double x) { return oracle::hypoexp_distinct({p.gamma().begin(), p.gamma().end()}, x); }

double oracle_expectation(const GosParams& p, const std::function<double(double)>& g) {
  return oracle::simpson_halfline([&](double x) { return g(x) * oracle_density(p, x); }, 0.0, 0.5);
}

// Random gamma vector of length r with sum 1/gamma_i = rho, rates kept distinct.
std::vector<double> random_gamma(std::mt19937_64& rng, std::size_t r, double rho) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w(r);
  double s = 0.0;
  for (double& v : w) s += (v = u(rng));
  std::vector<double> g;
  for (double v : w) g.push_back(s / (rho * v));
  return g;
}

Outcome table1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = cli::compute_table1({});
  const double dt = seconds_since(t0);
  double wb = 0.0, wbeta = 0.0;
  for (const auto& r : rows) {
    wb = std::max(wb, std::abs(r.bound - r.printed.bound));
    wbeta = std::max(wbeta, std::abs(r.beta0 - r.printed.beta0));
  }
  o.detail << rows.size() << " rows, max |d bound| " << wb << ", max |d beta0| " << wbeta << ", " << dt << " s";
  o.check(rows.size() == 20, "row count");
  o.check(wb <= 1e-3, "bound");
  o.check(wbeta <= 5e-3, "beta0");
  o.check(dt < 5.0, "runtime");
  return o;
}

Outcome alpha_root() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double a = find_root([](double x) { return x - (x + 1.0) * std::exp(-x); }, 0.1, 2.0);
  const double dt = seconds_since(t0);
  o.detail << "alpha0 = " << a << ", " << dt * 1e3 << " ms";
  o.check(std::abs(a - 0.8065) <= 5e-4, "value");
  o.check(std::abs(alpha0() - a) < 1e-15, "cached root");
  o.check(dt < 1e-3, "runtime");
  return o;
}

Outcome exponential_attainment() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> th(-5.0, 5.0), la(0.1, 5.0);
  double worst_rel = 0.0, worst_z = 0.0;
  for (int k = 0; k < 10; ++k) {
    const GosParams p(random_gamma(rng, 1 + k % 5, 1.0));
    const double theta = th(rng), lambda = la(rng), mu = theta + lambda;
    const double q = oracle_expectation(p, [&](double x) { return theta + lambda * x; });
    worst_rel = std::max(worst_rel, std::abs(q - mu) / std::abs(mu));
    const auto zero = bound_zero_cases(p);
    o.check(zero.bound_case == BoundCase::ZeroExact && zero.value == 0.0, "case");
    // Standardized by sigma_2 = lambda, so the estimate targets 0.
    const auto est = estimate_standardized_expectation_x(
        p, [&](double x) { return theta + lambda * x; }, MomentSpec{2.0, mu, lambda}, g_samples, 300 + k);
    worst_z = std::max(worst_z, std::abs(est.mean) / est.std_error);
  }
  o.detail << "max rel quadrature error " << worst_rel << ", max |z| " << worst_z;
  o.check(worst_rel <= 1e-8, "quadrature");
  o.check(worst_z <= 3.0, "monte carlo");
  return o;
}

Outcome linear_attainment() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> rho(1.05, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const GosParams p(random_gamma(rng, 2 + k % 3, rho(rng)));
    const auto r = bound_linear(p);
    const auto& a = *r.attainer;
    const double e = oracle_expectation(p, [&](double x) { return a.composed(x); });
    worst = std::max(worst, std::abs(e - (p.rho(1) - 1.0)));
    o.check(std::abs(r.value - (p.rho(1) - 1.0)) < 1e-14, "closed form");
  }
  o.detail << "max |E - (rho - 1)| " << worst;
  o.check(worst <= 1e-8, "quadrature");
  return o;
}

Outcome projection_case() {
  Outcome o;
  for (double g : {1.2, 1.3, 1.4}) {
    const auto t0 = std::chrono::steady_clock::now();
    const GosParams p({g, g, g});
    const auto r = bound_projection_C(p);
    const double res = std::abs(projection_equation(GosDensity(p), *r.alpha_or_y));
    const auto est = estimate_standardized_expectation(p, *r.attainer, g_samples, 500);
    const double z = std::abs(est.mean - r.value) / est.std_error;
    const double dt = seconds_since(t0);
    o.detail << " gamma " << g << ": C " << r.value << " residual " << res << " z " << z << " " << dt << " s;";
    o.check(res < 1e-10, "residual");
    o.check(z <= 3.0, "monte carlo");
    o.check(dt < 60.0, "runtime");
  }
  return o;
}

Outcome negative_attainment() {
  Outcome o;
  for (double g : {1.2, 1.5, 2.0}) {
    const GosParams p({g});
    const auto a = bound_first_gos_p1(g);
    const auto b = bound_B1(p);
    const auto c = bound_negative_Bp(p, 1.0);
    const double spread = std::max({std::abs(a.value - b.value), std::abs(b.value - c.value), std::abs(a.value - c.value)});
    o.check(spread <= 1e-10, "agreement");
    const MomentSpec m = MomentSpec::standard(1.0);
    const GosDensity d(p);
    const double alpha = c.alpha_or_y ? *c.alpha_or_y : 8.0;
    const auto att = c.attainer ? *c.attainer : attainer_prop2(alpha, b_coefficient(d, alpha), b1_value(d, alpha), m);
    const auto est = estimate_standardized_expectation(p, att, g_samples, 600);
    // For alpha = 8 the exponential piece has probability e^{-8 gamma}, so a
    // run may never leave the atom and the sample SE collapses to 0. The SE
    // uses the exact standard deviation of the attainer instead.
    auto v = [&](double x) { return (att.composed(x) - m.mu) / m.sigma_p; };
    auto moment = [&](int k) {
      auto f = [&](double x) { return std::pow(v(x), k) * oracle_density(p, x); };
      return oracle::simpson(f, 0.0, alpha) + oracle::simpson_halfline(f, alpha, 0.5, 400.0);
    };
    const double e1 = moment(1), sd = std::sqrt(moment(2) - e1 * e1);
    const double se = sd / std::sqrt(static_cast<double>(est.n_samples));
    const double z = std::abs(est.mean - c.value) / se;
    o.detail << " gamma " << g << ": bound " << c.value << " alpha " << alpha << " estimate " << est.mean << " exact mean "
             << e1 << " SE " << se << " (sample SE " << est.std_error << ") z " << z << " spread " << spread << ";";
    o.check(z <= 3.0, "monte carlo");
  }
  return o;
}

Outcome validity() {
  Outcome o;
  struct Point {
    std::vector<double> gamma;
    double p;
  };
  const std::vector<Point> points = {
      {{2, 2, 2}, 2.0},       {{1.5, 1.5, 3}, 2.0}, {{1.4, 1.4, 1.4}, 2.0}, {{1.2, 1.2, 1.2}, 2.0},
      {{2, 2}, 2.0},          {{3, 3, 3}, 1.0},     {{4, 2}, 1.0},          {{4, 2}, 2.0},
      {{5, 4, 3}, 1.5},       {{1.2}, 1.0},         {{1.5}, 1.0},           {{2}, 1.0},
      {{2}, 2.0},             {{1}, 2.0},
  };
  const auto zoo = standard_dfr_zoo();
  std::set<std::string> cases;
  double worst = -kInf;
  std::string worst_at;
  int runs = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const GosParams par(points[i].gamma);
    const auto r = dfr_bound(par, points[i].p);
    cases.insert(std::string(to_string(r.bound_case)));
    for (std::size_t k = 0; k < zoo.size(); ++k) {
      const auto& dist = zoo[k];
      const auto est = estimate_standardized_expectation_x(
          par, [&](double x) { return dist.composed(x); }, dist.moments(points[i].p), g_samples, 1000 * i + k);
      const double excess = (est.mean - r.value) / est.std_error;
      if (excess > worst) {
        worst = excess;
        worst_at = dist.name() + " at point " + std::to_string(i);
      }
      ++runs;
    }
  }
  o.detail << runs << " runs over " << points.size() << " points, " << zoo.size() << " distributions, " << cases.size()
           << " cases; max (estimate - bound)/SE " << worst << " (" << worst_at << "), " << seconds_since(t0) << " s";
  o.check(worst <= 3.0, "bound exceeded");
  // ZeroLimit is never produced, so six cases is every reachable one.
  o.check(cases.size() >= 6, "case coverage");
  return o;
}

Outcome density_identities() {
  Outcome o;
  double worst_norm = 0.0, worst_tail = 0.0, worst_ks = 0.0;
  for (auto g : std::vector<std::vector<double>>{{2}, {4, 2}, {3, 2, 1.5}, {5, 5, 2}, {1.4, 1.4, 1.4}, {8, 3, 1, 0.7}}) {
    const GosParams p(g);
    const GosDensity d(p);
    auto h = [&](double x) { return d.hypoexp_density(d.rank(), x); };
    worst_norm = std::max(worst_norm, std::abs(oracle::simpson_halfline(h, 0.0, 0.5) - 1.0));
    for (double a = 0.0; a <= 8.0; a += 0.5) {
      const double t0 = oracle::simpson_halfline(h, a, 0.5);
      const double t1 = oracle::simpson_halfline([&](double x) { return (x - a) * h(x); }, a, 0.5);
      worst_tail = std::max({worst_tail, std::abs(d.tail_integral_0(a) - t0) / t0, std::abs(d.tail_integral_1(a) - t1) / t1});
    }
    const auto x = sample_exponential_argument(p, 200000, 700, SamplingRoute::ExponentialSum);
    const auto y = sample_exponential_argument(p, 200000, 700, SamplingRoute::BetaProduct);
    worst_ks = std::max(worst_ks, ks_two_sample_statistic(x, y) / ks_two_sample_critical_1pct(x.size(), y.size()));
  }
  o.detail << "max normalization error " << worst_norm << ", max tail rel error " << worst_tail
           << ", max KS/critical " << worst_ks;
  o.check(worst_norm <= 1e-8, "normalization");
  o.check(worst_tail <= 1e-10, "tail identities");
  o.check(worst_ks < 1.0, "two-sample KS");
  return o;
}

Outcome closed_forms() {
  Outcome o;
  double w1 = 0.0, w2 = 0.0;
  for (double a = 0.01; a < 1.0; a += 0.01) {
    // N_p from its defining display with the inner integral by quadrature.
    auto display = [&](double p) {
      const double inner = oracle::simpson([&](double y) { return std::pow(y, p) * std::exp(y); }, 0.0, a, 1e-16);
      return std::pow(std::pow(a, p) - std::pow(a, p + 1) + a * std::exp(-a) * (inner + std::tgamma(p + 1.0)), 1.0 / p);
    };
    w1 = std::max({w1, std::abs(display(1.0) - 2.0 * a * std::exp(-a)), std::abs(normalizer_np(1.0, a) - display(1.0))});
    w2 = std::max({w2, std::abs(display(2.0) - std::sqrt(a * (2.0 - a))), std::abs(normalizer_np(2.0, a) - display(2.0))});
  }
  double prev = kInf;
  bool monotone = true, negative = true;
  o.detail << "max |N_1 err| " << w1 << ", max |N_2 err| " << w2 << ", seq:";
  for (double a : {1e-1, 1e-2, 1e-3}) {
    const double s = first_gos_sequence(2.0, 2.0, a);
    o.detail << ' ' << s;
    negative = negative && s < 0.0;
    monotone = monotone && std::abs(s) < prev;
    prev = std::abs(s);
  }
  o.check(w1 <= 1e-10, "N_1");
  o.check(w2 <= 1e-10, "N_2");
  o.check(monotone && negative, "sequence");
  return o;
}

Outcome dfra_continuity() {
  Outcome o;
  double worst = 0.0;
  for (auto g : std::vector<std::vector<double>>{{3, 2}, {4, 2}, {5, 3}}) {
    const GosParams par(g);
    const GosDensity d(par);
    for (double p : {1.0, 2.0}) {
      const double lo = bstar_low(d, p, alpha0() - 1e-9), hi = bstar_high(d, p, alpha0() + 1e-9);
      worst = std::max(worst, std::abs(lo - hi) / std::abs(hi));
      const auto r = bound_dfra(par, p);
      if (r.attained_in_limit) {
        o.detail << " (" << g[0] << "," << g[1] << ") p=" << p << " AtInfinity value " << r.value << ";";
        o.check(std::abs(r.value) <= 1e-6, "limit value for p=" + std::to_string(static_cast<int>(p)));
      } else {
        o.detail << " (" << g[0] << "," << g[1] << ") p=" << p << " argmin " << *r.alpha_or_y << " value " << r.value << ";";
      }
    }
  }
  o.detail << " max branch gap " << worst;
  o.check(worst < 1e-6, "continuity");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--samples" && i + 1 < argc) {
      g_samples = std::stoll(argv[++i]);
    } else if (a == "--known-fail" && i + 1 < argc) {
      for (double v : cli::parse_list(argv[++i])) known.insert(static_cast<int>(v));
    } else {
      std::fprintf(stderr, "usage: acceptance [--samples N] [--known-fail i,j,...]\n");
      return 3;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Table 1 reproduction", table1},
      {"alpha0 root", alpha_root},
      {"exact exponential attainment", exponential_attainment},
      {"linear-case attainment", linear_attainment},
      {"projection case", projection_case},
      {"negative-bound attainment", negative_attainment},
      {"validity suite", validity},
      {"density identities", density_identities},
      {"closed-form reductions", closed_forms},
      {"DFRA branch continuity", dfra_continuity},
  };
  int unexpected = 0, failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double dt = seconds_since(t0);
    if (!o.pass) {
      ++failed;
      if (!known.count(id)) ++unexpected;
    }
    std::printf("[%s] %2d %s (%.2f s): %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), dt,
                o.detail.str().c_str(), !o.pass && known.count(id) ? " (known failure)" : "");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return unexpected == 0 ? 0 : 1;
}
