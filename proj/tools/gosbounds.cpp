#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace gosbounds;
using namespace gosbounds::cli;

namespace {

Tolerances base_tolerances(const std::string& profile_flag, const std::string& config_path) {
  std::string profile = profile_flag;
  if (profile.empty()) {
    if (const char* env = std::getenv("GOSBOUNDS_TOLERANCE_PROFILE")) profile = env;
  }
  Tolerances tol = Tolerances::profile(profile);
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw Error(ErrorCode::IOError, "cannot read config '" + config_path + "'");
    Json j = Json::parse(f);
    merge_tolerances(j.contains("tolerances") ? j.at("tolerances") : j, tol);
  }
  return tol;
}

void emit_record(const Json& record, const std::string& json_path) {
  if (json_path.empty()) return;
  const std::string text = record.dump(2) + "\n";
  if (json_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(json_path);
  if (!f) throw Error(ErrorCode::IOError, "cannot open '" + json_path + "' for writing");
  f << text;
}

int exit_code_for(const Error& e) {
  if (e.unsupported()) return kUnsupported;
  if (e.code() == ErrorCode::EmptyVector || e.code() == ErrorCode::NonPositiveGamma ||
      e.code() == ErrorCode::InvalidModelParameters || e.code() == ErrorCode::InvalidTolerances ||
      e.code() == ErrorCode::WrongCase) {
    return kUsage;
  }
  return kNumericalFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp bounds on expectations of generalized order statistics from DFR and DFRA parents"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", GOSBOUNDS_VERSION);

  std::string profile, config, json_path;
  app.add_option("--profile", profile, "tolerance profile: default, strict or fast (env GOSBOUNDS_TOLERANCE_PROFILE)");
  app.add_option("--config", config, "JSON file with tolerance overrides");
  app.add_option("--json", json_path, "write the run record as JSON to this path ('-' for stdout)");

  // Shared parameter flags.
  std::string family = "dfr", gamma_text, model, condition = "per-rank";
  double p = 2.0, mu = 0.0, sigma = 1.0;
  auto add_param_flags = [&](CLI::App* sub) {
    sub->add_option("--family", family, "dfr or dfra")->check(CLI::IsMember({"dfr", "dfra"}));
    auto* g = sub->add_option("--gamma", gamma_text, "comma-separated gamma_1,...,gamma_r");
    auto* m = sub->add_option("--model", model, "os:n:r, rec:k:r or pc:n:R1,...,Rm:r");
    g->excludes(m);
    sub->add_option("--p", p, "moment order p >= 1")->check(CLI::Range(1.0, 1e6));
    sub->add_option("--mu", mu, "parent mean");
    sub->add_option("--sigma", sigma, "parent p-th central absolute moment root")->check(CLI::PositiveNumber);
    sub->add_option("--condition", condition, "DFRA condition reading: per-rank or literal")
        ->check(CLI::IsMember({"per-rank", "literal"}));
  };

  auto* bound = app.add_subcommand("bound", "compute a bound");
  add_param_flags(bound);

  auto* table1 = app.add_subcommand("table1", "recompute the first-gOS p = 1 table");
  std::string output = "-", format = "csv";
  table1->add_option("--output,-o", output, "output path ('-' for stdout)");
  table1->add_option("--format", format, "csv, json or tex")->check(CLI::IsMember({"csv", "json", "tex"}));

  auto* verify = app.add_subcommand("verify", "check a bound by Monte Carlo");
  add_param_flags(verify);
  std::string mode = "attainer";
  std::int64_t samples = 1000000;
  std::uint64_t seed = 20240601;
  double offset = 0.0, limit_alpha = 8.0;
  verify->add_option("--mode", mode, "attainer or zoo")->check(CLI::IsMember({"attainer", "zoo"}));
  verify->add_option("--samples", samples, "Monte Carlo sample size")->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--limit-alpha", limit_alpha, "alpha of the sequence member used when the bound is a limit");
  verify->add_option("--bound-offset", offset, "add this to the bound before checking (harness self-test)");

  auto* sweep = app.add_subcommand("sweep", "bounds over a parameter grid as CSV");
  add_param_flags(sweep);
  std::string grid1, grid;
  sweep->add_option("--gamma1-grid", grid1, "comma-separated gamma_1 values (r = 1)");
  sweep->add_option("--gamma-grid", grid, "semicolon-separated gamma vectors, e.g. '3,2;4,2'");
  sweep->add_option("--output,-o", output, "CSV output path ('-' for stdout)");

  auto* replay = app.add_subcommand("replay", "re-run a JSON run record and compare results");
  std::string record_path;
  double replay_tol = 1e-9;
  replay->add_option("record", record_path, "run record JSON")->required();
  replay->add_option("--tolerance", replay_tol, "largest accepted absolute difference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto param_json = [&]() {
    Json j{{"family", family}, {"p", p}, {"mu", mu}, {"sigma", sigma}, {"condition", condition}};
    if (!gamma_text.empty()) j["gamma"] = parse_list(gamma_text);
    if (!model.empty()) j["model"] = model;
    return j;
  };

  try {
    const Tolerances tol = base_tolerances(profile, config);
    Json params, record;
    std::string command;
    if (bound->parsed()) {
      command = "bound";
      params = param_json();
    } else if (table1->parsed()) {
      command = "table1";
      params = Json{{"output", output}, {"format", format}};
    } else if (verify->parsed()) {
      command = "verify";
      params = param_json();
      params.update(Json{{"mode", mode}, {"samples", samples}, {"seed", seed}, {"limit_alpha", limit_alpha}, {"bound_offset", offset}});
    } else if (sweep->parsed()) {
      command = "sweep";
      params = param_json();
      params.erase("gamma");
      params.erase("model");
      if (!grid1.empty()) params["gamma1_grid"] = parse_list(grid1);
      if (!grid.empty()) {
        std::vector<std::vector<double>> vs;
        std::stringstream ss(grid);
        std::string item;
        while (std::getline(ss, item, ';'))
          if (!item.empty()) vs.push_back(parse_list(item));
        params["gamma_grid"] = vs;
      }
      params["output"] = output;
    } else {
      std::ifstream f(record_path);
      if (!f) throw Error(ErrorCode::IOError, "cannot read record '" + record_path + "'");
      const Json old = Json::parse(f);
      Tolerances rec_tol = tol;
      merge_tolerances(old.at("tolerances"), rec_tol);
      Json rerun_params = old.at("parameters");
      // Replays never overwrite the original outputs.
      if (rerun_params.contains("output")) rerun_params["output"] = "-";
      std::ostringstream sink;
      const int code = run_command(old.at("command").get<std::string>(), rerun_params, rec_tol, sink, record);
      const double diff = max_numeric_difference(old.at("results"), record.at("results"));
      const bool same = diff <= replay_tol;
      std::cout << "replayed " << old.at("command").get<std::string>() << ": max |difference| " << sig6(diff) << "  "
                << (same ? "REPRODUCED" : "MISMATCH") << '\n';
      record["replay"] = Json{{"source", record_path}, {"max_abs_difference", number_to_json(diff)}, {"reproduced", same}};
      emit_record(record, json_path);
      if (!same) return kVerificationFailed;
      return code;
    }
    std::ostream& human = json_path == "-" ? std::cerr : std::cout;
    const int code = run_command(command, params, tol, human, record);
    emit_record(record, json_path);
    return code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return kUsage;
  }
}
