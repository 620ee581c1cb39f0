#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "gosbounds/dfr_bounds.hpp"
#include "gosbounds/extremal.hpp"
#include "gosbounds/montecarlo.hpp"
#include "gosbounds/numerics.hpp"
#include "gosbounds/params.hpp"

namespace gosbounds {

using Json = nlohmann::json;

/// JSON has no infinities; they are written as the strings "inf"/"-inf".
inline Json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return std::nan("");
}

inline void to_json(Json& j, const Tolerances& t) {
  j = Json{{"quad_rel", t.quad_rel},       {"quad_abs", t.quad_abs},   {"root_abs", t.root_abs},
           {"min_abs_x", t.min_abs_x},     {"min_abs_f", t.min_abs_f}, {"grid_points", t.grid_points},
           {"max_subdivisions", t.max_subdivisions}, {"scan_step", t.scan_step}, {"scan_cap", t.scan_cap}};
}

/// Fields missing from `j` keep the values already in `t`.
inline void merge_tolerances(const Json& j, Tolerances& t) {
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("quad_rel", t.quad_rel);
  take("quad_abs", t.quad_abs);
  take("root_abs", t.root_abs);
  take("min_abs_x", t.min_abs_x);
  take("min_abs_f", t.min_abs_f);
  take("grid_points", t.grid_points);
  take("max_subdivisions", t.max_subdivisions);
  take("scan_step", t.scan_step);
  take("scan_cap", t.scan_cap);
  t.validate();
}

inline void from_json(const Json& j, Tolerances& t) {
  t = Tolerances{};
  merge_tolerances(j, t);
}

inline void to_json(Json& j, const MomentSpec& m) { j = Json{{"p", m.p}, {"mu", m.mu}, {"sigma_p", m.sigma_p}}; }

inline void from_json(const Json& j, MomentSpec& m) {
  m.p = j.at("p").get<double>();
  m.mu = j.value("mu", 0.0);
  m.sigma_p = j.value("sigma_p", 1.0);
}

inline void to_json(Json& j, const GosParams& p) {
  j = Json{{"gamma", std::vector<double>(p.gamma().begin(), p.gamma().end())}, {"rho", p.rho(1)}};
}

inline void to_json(Json& j, const QuantilePiece& piece) {
  j = Json{{"x_lo", number_to_json(piece.x_lo)},
           {"x_hi", number_to_json(piece.x_hi)},
           {"u_lo", piece.u_lo()},
           {"u_hi", piece.u_hi()}};
  std::visit(
      [&j](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Atom>) {
          j["kind"] = "Atom";
          j["location"] = s.value;
        } else if constexpr (std::is_same_v<S, ExponentialTail>) {
          j["kind"] = "ExponentialTail";
          j["location"] = s.location;
          j["scale"] = s.scale;
          j["onset_x"] = s.onset_x;
        } else if constexpr (std::is_same_v<S, AffineInExponentialArgument>) {
          j["kind"] = "AffineInExponentialArgument";
          j["slope"] = s.slope;
          j["intercept"] = s.intercept;
        } else {
          j["kind"] = "InverseDensitySegment";
          j["gamma"] = std::vector<double>(s.density->params().gamma().begin(), s.density->params().gamma().end());
          j["scale"] = s.scale;
          j["shift"] = s.shift;
        }
      },
      piece.shape);
}

inline void to_json(Json& j, const ExtremalDistribution& d) {
  j = Json{{"label", d.label()}, {"moments", d.moments()}, {"pieces", d.pieces()}};
}

inline void to_json(Json& j, const BoundResult& r) {
  j = Json{{"value", r.value},
           {"case", std::string(to_string(r.bound_case))},
           {"attained_in_limit", r.attained_in_limit},
           {"strictly_negative_for_all_f", r.strictly_negative_for_all_f},
           {"warnings", r.warnings}};
  j["alpha_or_y"] = r.alpha_or_y ? Json(*r.alpha_or_y) : Json(nullptr);
  Json diag = Json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = number_to_json(v);
  j["diagnostics"] = diag;
  j["attainer"] = r.attainer ? Json(*r.attainer) : Json(nullptr);
}

inline void to_json(Json& j, const EstimateWithCI& e) {
  j = Json{{"mean", e.mean},
           {"std_error", e.std_error},
           {"n_samples", e.n_samples},
           {"seed", e.seed},
           {"route", std::string(to_string(e.route))},
           {"ci95", {e.ci95_lo(), e.ci95_hi()}}};
}

}  // namespace gosbounds
