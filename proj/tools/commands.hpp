#pragma once

// Command implementations behind the gosbounds executable. Each command takes
// its inputs as a JSON object so that a RunRecord can be replayed verbatim.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gosbounds/gosbounds.hpp"
#include "gosbounds/serialization.hpp"

namespace gosbounds::cli {

enum ExitCode : int { kOk = 0, kNumericalFailure = 1, kUnsupported = 2, kUsage = 3, kVerificationFailed = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Table1Row {
  double gamma1;
  double beta0;
  double bound;
};

/// Rows (gamma_1, beta_0, bound) as printed, decimal commas normalized.
inline const std::vector<Table1Row>& table1_printed() {
  static const std::vector<Table1Row> rows = {
      {1.005, 0.99, -0.0068},  {1.01, 0.9801, -0.0135}, {1.03, 0.9412, -0.0396}, {1.04, 0.9221, -0.0523},
      {1.05, 0.9032, -0.0647}, {1.06, 0.8846, -0.0769}, {1.07, 0.8662, -0.0889}, {1.08, 0.8480, -0.1006},
      {1.09, 0.8301, -0.1122}, {1.1, 0.8123, -0.1235},  {1.2, 0.6461, -0.2255},  {1.3, 0.4980, -0.3093},
      {1.4, 0.3661, -0.3765},  {1.5, 0.2500, -0.4280},  {1.6, 0.1509, -0.4646},  {1.7, 0.0720, -0.4872},
      {1.8, 0.0196, -0.4977},  {1.9, 0.0006, -0.4999},  {2.0, 0.0, -0.5000},     {3.0, 0.0, -0.5000},
  };
  return rows;
}

inline std::string sig6(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline std::string full(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// --- parameter parsing --------------------------------------------------------

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
  }
  return out;
}

/// "os:n:r", "rec:k:r" or "pc:n:R1,R2,...:r".
inline Model parse_model(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto to_int = [](const std::string& s) {
    try {
      return std::stoi(s);
    } catch (const std::exception&) {
      throw UsageError("not an integer: '" + s + "'");
    }
  };
  if (parts.size() == 3 && parts[0] == "os") return OrderStatistics{to_int(parts[1]), to_int(parts[2])};
  if (parts.size() == 3 && parts[0] == "rec") return KRecords{to_int(parts[1]), to_int(parts[2])};
  if (parts.size() == 4 && parts[0] == "pc") {
    std::vector<int> removals;
    for (double v : parse_list(parts[2])) removals.push_back(static_cast<int>(v));
    return ProgressiveCensoring{to_int(parts[1]), removals, to_int(parts[3])};
  }
  throw UsageError("model must be os:n:r, rec:k:r or pc:n:R1,...,Rm:r, got '" + spec + "'");
}

/// gamma vector from a parameter object holding either "gamma" or "model".
inline GosParams params_from(const Json& in) {
  if (in.contains("gamma") && !in.at("gamma").is_null()) return GosParams(in.at("gamma").get<std::vector<double>>());
  if (in.contains("model") && !in.at("model").is_null()) {
    return std::visit([](const auto& m) { return from_model(m); }, parse_model(in.at("model").get<std::string>()));
  }
  throw UsageError("either --gamma or --model is required");
}

inline MomentSpec moments_from(const Json& in) {
  MomentSpec m{in.value("p", 2.0), in.value("mu", 0.0), in.value("sigma", 1.0)};
  m.validate();
  return m;
}

inline ConditionReading reading_from(const Json& in) {
  const auto s = in.value("condition", std::string("per-rank"));
  if (s == "per-rank") return ConditionReading::PerRank;
  if (s == "literal") return ConditionReading::LiteralR;
  throw UsageError("--condition must be per-rank or literal");
}

inline std::string family_from(const Json& in) {
  const auto f = in.value("family", std::string("dfr"));
  if (f != "dfr" && f != "dfra") throw UsageError("--family must be dfr or dfra");
  return f;
}

inline BoundResult compute_bound(const Json& in, const Tolerances& tol) {
  const GosParams params = params_from(in);
  const MomentSpec m = moments_from(in);
  if (family_from(in) == "dfra") return bound_dfra(params, m.p, tol, m, reading_from(in));
  return dfr_bound(params, m.p, tol, m);
}

// --- bound ----------------------------------------------------------------------

inline Json cmd_bound(const Json& in, const Tolerances& tol, std::ostream& human) {
  const GosParams params = params_from(in);
  const BoundResult res = compute_bound(in, tol);
  human << "family " << family_from(in) << ", gamma =";
  for (double g : params.gamma()) human << ' ' << sig6(g);
  human << ", rho = " << sig6(params.rho(1)) << ", p = " << sig6(moments_from(in).p) << '\n';
  human << "case " << to_string(res.bound_case) << ": bound " << sig6(res.value);
  if (res.attained_in_limit) human << " (approached in the limit)";
  human << '\n';
  if (res.alpha_or_y) human << "  argument " << sig6(*res.alpha_or_y) << '\n';
  for (const auto& [k, v] : res.diagnostics) human << "  " << k << " = " << sig6(v) << '\n';
  for (const auto& w : res.warnings) human << "  warning: " << w << '\n';
  Json out = res;
  out["gamma"] = params;
  return out;
}

// --- table1 -----------------------------------------------------------------------

struct Table1Computed {
  Table1Row printed;
  double beta0;
  double bound;
};

inline std::vector<Table1Computed> compute_table1(const Tolerances& tol) {
  std::vector<Table1Computed> rows;
  for (const auto& row : table1_printed()) {
    const BoundResult r = bound_first_gos_p1(row.gamma1, tol);
    rows.push_back({row, r.diagnostics.at("beta0"), r.value});
  }
  return rows;
}

inline std::string table1_csv(const std::vector<Table1Computed>& rows) {
  std::ostringstream os;
  os << "gamma1,beta0,bound,printed_beta0,printed_bound,delta_beta0,delta_bound\r\n";
  for (const auto& r : rows) {
    os << full(r.printed.gamma1) << ',' << full(r.beta0) << ',' << full(r.bound) << ',' << full(r.printed.beta0) << ','
       << full(r.printed.bound) << ',' << full(r.beta0 - r.printed.beta0) << ',' << full(r.bound - r.printed.bound)
       << "\r\n";
  }
  return os.str();
}

inline std::string table1_tex(const std::vector<Table1Computed>& rows) {
  std::ostringstream os;
  os << "\\begin{tabular}{rrrrr}\n\\hline\n$\\gamma_1$ & $\\beta_0$ & bound & printed $\\beta_0$ & printed bound \\\\\n\\hline\n";
  os << std::fixed;
  for (const auto& r : rows) {
    os << std::setprecision(3) << r.printed.gamma1 << " & " << std::setprecision(4) << r.beta0 << " & " << r.bound
       << " & " << r.printed.beta0 << " & " << r.printed.bound << " \\\\\n";
  }
  os << "\\hline\n\\end{tabular}\n";
  return os.str();
}

inline Json table1_json(const std::vector<Table1Computed>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"gamma1", r.printed.gamma1},
                   {"beta0", r.beta0},
                   {"bound", r.bound},
                   {"printed_beta0", r.printed.beta0},
                   {"printed_bound", r.printed.bound},
                   {"delta_beta0", r.beta0 - r.printed.beta0},
                   {"delta_bound", r.bound - r.printed.bound}});
  }
  return arr;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& human) {
  if (path.empty() || path == "-") {
    human << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error(ErrorCode::IOError, "write to '" + path + "' failed");
}

inline Json cmd_table1(const Json& in, const Tolerances& tol, std::ostream& human) {
  const auto format = in.value("format", std::string("csv"));
  const auto path = in.value("output", std::string("-"));
  const auto rows = compute_table1(tol);
  std::string text;
  if (format == "csv") {
    text = table1_csv(rows);
  } else if (format == "json") {
    text = table1_json(rows).dump(2) + "\n";
  } else if (format == "tex") {
    text = table1_tex(rows);
  } else {
    throw UsageError("--format must be csv, json or tex");
  }
  write_text(path, text, human);
  double worst_bound = 0.0, worst_beta = 0.0;
  for (const auto& r : rows) {
    worst_bound = std::max(worst_bound, std::abs(r.bound - r.printed.bound));
    worst_beta = std::max(worst_beta, std::abs(r.beta0 - r.printed.beta0));
  }
  if (path != "-" && !path.empty()) {
    human << "wrote " << rows.size() << " rows to " << path << "; max |delta bound| " << sig6(worst_bound)
          << ", max |delta beta0| " << sig6(worst_beta) << '\n';
  }
  return Json{{"rows", table1_json(rows)}, {"max_abs_delta_bound", worst_bound}, {"max_abs_delta_beta0", worst_beta}};
}

// --- verify -----------------------------------------------------------------------

/// Attaining distribution of a bound result, or a member of the approximating
/// sequence at `limit_alpha` when the bound is only approached.
inline std::optional<ExtremalDistribution> attainer_for(const Json& in, const BoundResult& res, double limit_alpha,
                                                        const Tolerances& tol) {
  if (res.attainer) return res.attainer;
  const GosParams params = params_from(in);
  const MomentSpec m = moments_from(in);
  const GosDensity d(params);
  switch (res.bound_case) {
    case BoundCase::NegativeBp:
    case BoundCase::FirstGosP1: {
      const double bp = m.p == 1.0 ? b1_value(d, limit_alpha) : bp_value(d, m.p, limit_alpha);
      return attainer_prop2(limit_alpha, b_coefficient(d, limit_alpha), bp, m);
    }
    case BoundCase::FirstGosZero:
      return attainer_prop3(params.gamma(1), m.p, std::exp(-limit_alpha), m);
    case BoundCase::DfraNegative:
      return attainer_dfra(limit_alpha, b_alpha(d, limit_alpha), bstar_value(d, m.p, limit_alpha, tol), m);
    default:
      return std::nullopt;
  }
}

inline Json estimate_json(const EstimateWithCI& e, double bound, bool two_sided) {
  const bool below = e.mean <= bound + 3.0 * e.std_error;
  const bool close = std::abs(e.mean - bound) <= 3.0 * e.std_error;
  Json j = e;
  j["bound"] = bound;
  j["below_bound_plus_3se"] = below;
  if (two_sided) j["within_3se_of_bound"] = close;
  j["pass"] = two_sided ? (below && close) : below;
  return j;
}

inline Json cmd_verify(const Json& in, const Tolerances& tol, std::ostream& human) {
  const GosParams params = params_from(in);
  const MomentSpec m = moments_from(in);
  const auto mode = in.value("mode", std::string("attainer"));
  const auto samples = in.value("samples", static_cast<std::int64_t>(1000000));
  const auto seed = in.value("seed", static_cast<std::uint64_t>(20240601));
  const double offset = in.value("bound_offset", 0.0);
  const double limit_alpha = in.value("limit_alpha", 8.0);
  if (samples < 2) throw UsageError("--samples must be at least 2");

  const BoundResult res = compute_bound(in, tol);
  const double bound = res.value + offset;
  human << "bound " << sig6(bound) << " (" << to_string(res.bound_case) << ")";
  if (offset != 0.0) human << " including injected offset " << sig6(offset);
  human << '\n';

  Json out{{"bound", res}, {"checked_bound", bound}, {"mode", mode}};
  bool all_pass = true;
  if (mode == "attainer") {
    const auto att = attainer_for(in, res, limit_alpha, tol);
    if (!att) throw Error(ErrorCode::UnsupportedByTheory, "no attaining distribution is described for this case");
    const auto est = estimate_standardized_expectation(params, *att, samples, seed);
    Json e = estimate_json(est, bound, true);
    e["attainer"] = *att;
    e["attainer_alpha"] = res.attainer ? Json(nullptr) : Json(limit_alpha);
    all_pass = e["pass"].get<bool>();
    human << "attainer " << att->label() << ": estimate " << sig6(est.mean) << " +- " << sig6(est.std_error) << "  "
          << (all_pass ? "PASS" : "FAIL") << '\n';
    out["estimates"] = Json::array({e});
  } else if (mode == "zoo") {
    Json arr = Json::array();
    std::uint64_t k = 0;
    for (const auto& dist : standard_dfr_zoo()) {
      const MomentSpec dm = dist.moments(m.p, tol);
      const auto est = estimate_standardized_expectation_x(
          params, [&](double x) { return dist.composed(x); }, dm, samples, seed + k++);
      Json e = estimate_json(est, bound, false);
      e["distribution"] = dist.name();
      const bool pass = e["pass"].get<bool>();
      all_pass = all_pass && pass;
      human << dist.name() << ": estimate " << sig6(est.mean) << " +- " << sig6(est.std_error) << "  "
            << (pass ? "PASS" : "FAIL") << '\n';
      arr.push_back(e);
    }
    out["estimates"] = arr;
  } else {
    throw UsageError("--mode must be attainer or zoo");
  }
  out["pass"] = all_pass;
  human << (all_pass ? "PASS" : "FAIL") << '\n';
  return out;
}

// --- sweep ------------------------------------------------------------------------

/// Grid points as gamma vectors: either "gamma1_grid" (first gOS) or
/// "gamma_grid" (list of vectors).
inline std::vector<std::vector<double>> sweep_points(const Json& in) {
  std::vector<std::vector<double>> pts;
  if (in.contains("gamma1_grid")) {
    for (double g : in.at("gamma1_grid").get<std::vector<double>>()) pts.push_back({g});
  }
  if (in.contains("gamma_grid")) {
    for (const auto& v : in.at("gamma_grid").get<std::vector<std::vector<double>>>()) pts.push_back(v);
  }
  if (pts.empty()) throw UsageError("the sweep grid is empty");
  return pts;
}

inline Json cmd_sweep(const Json& in, const Tolerances& tol, std::ostream& human) {
  const auto pts = sweep_points(in);
  const auto path = in.value("output", std::string("-"));
  std::ostringstream csv;
  csv << "gamma,rho,p,family,case,value,argument,attained_in_limit,error\r\n";
  Json rows = Json::array();
  std::vector<double> values;
  bool all_ok = true;
  for (const auto& g : pts) {
    Json point = in;
    point.erase("gamma1_grid");
    point.erase("gamma_grid");
    point.erase("model");
    point["gamma"] = g;
    std::string gamma_text;
    for (std::size_t i = 0; i < g.size(); ++i) gamma_text += (i ? " " : "") + full(g[i]);
    const GosParams params(g);
    Json row{{"gamma", g}, {"rho", params.rho(1)}};
    try {
      const BoundResult r = compute_bound(point, tol);
      row["case"] = std::string(to_string(r.bound_case));
      row["value"] = r.value;
      row["argument"] = r.alpha_or_y ? Json(*r.alpha_or_y) : Json(nullptr);
      row["attained_in_limit"] = r.attained_in_limit;
      values.push_back(r.value);
      csv << '"' << gamma_text << "\"," << full(params.rho(1)) << ',' << full(moments_from(point).p) << ','
          << family_from(point) << ',' << to_string(r.bound_case) << ',' << full(r.value) << ','
          << (r.alpha_or_y ? full(*r.alpha_or_y) : std::string()) << ',' << (r.attained_in_limit ? 1 : 0) << ",\r\n";
    } catch (const Error& e) {
      all_ok = false;
      row["error"] = e.what();
      values.push_back(std::nan(""));
      csv << '"' << gamma_text << "\"," << full(params.rho(1)) << ',' << full(moments_from(point).p) << ','
          << family_from(point) << ",,,,,\"" << to_string(e.code()) << "\"\r\n";
    }
    rows.push_back(row);
  }
  write_text(path, csv.str(), human);

  bool nonincreasing = true, decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] <= values[i - 1])) nonincreasing = false;
    if (!(values[i] < values[i - 1])) decreasing = false;
  }
  Json diag{{"points", values.size()}, {"nonincreasing", nonincreasing}, {"strictly_decreasing", decreasing}};
  if (path != "-" && !path.empty()) {
    human << "wrote " << values.size() << " rows to " << path << "; values "
          << (decreasing ? "strictly decreasing" : nonincreasing ? "nonincreasing" : "not monotone") << '\n';
  }
  return Json{{"rows", rows}, {"monotonicity", diag}, {"all_ok", all_ok}};
}

// --- records ----------------------------------------------------------------------

inline Json make_record(const std::string& command, const Json& params, const Tolerances& tol, const Json& results,
                        double wall_time) {
  return Json{{"command", command},
              {"parameters", params},
              {"tolerances", tol},
              {"results", results},
              {"wall_time_s", wall_time},
              {"version", GOSBOUNDS_VERSION}};
}

/// Runs one command; the exit code reflects verification failures, and
/// library errors propagate to the caller.
inline int run_command(const std::string& command, const Json& params, const Tolerances& tol, std::ostream& human,
                       Json& record) {
  const auto t0 = std::chrono::steady_clock::now();
  Json results;
  int code = kOk;
  if (command == "bound") {
    results = cmd_bound(params, tol, human);
  } else if (command == "table1") {
    results = cmd_table1(params, tol, human);
  } else if (command == "verify") {
    results = cmd_verify(params, tol, human);
    if (!results.at("pass").get<bool>()) code = kVerificationFailed;
  } else if (command == "sweep") {
    results = cmd_sweep(params, tol, human);
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  record = make_record(command, params, tol, results, dt);
  return code;
}

/// Largest absolute difference between numbers at matching positions of two
/// result trees, skipping timing fields.
inline double max_numeric_difference(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return std::abs(a.get<double>() - b.get<double>());
  if (a.is_object() && b.is_object()) {
    double d = 0.0;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (it.key() == "wall_time_s" || it.key() == "evaluations") continue;
      if (!b.contains(it.key())) return kInf;
      d = std::max(d, max_numeric_difference(it.value(), b.at(it.key())));
    }
    return d;
  }
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) return kInf;
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, max_numeric_difference(a[i], b[i]));
    return d;
  }
  return a == b ? 0.0 : kInf;
}

}  // namespace gosbounds::cli
