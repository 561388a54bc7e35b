#include "atomslit/cli/commands.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "atomslit/dynamics.hpp"
#include "atomslit/stats.hpp"

#ifndef ATOMSLIT_VERSION
#define ATOMSLIT_VERSION "0.0.0"
#endif

namespace atomslit::cli {

using nlohmann::json;

namespace {

json params_json(const PhysicalParams& p) {
  json j;
  j["rabi_rad_s"] = p.rabi;
  j["detuning_rad_s"] = p.detuning;
  j["zeeman_ground_rad_s"] = p.zeeman_ground;
  j["zeeman_excited_rad_s"] = p.zeeman_excited;
  j["linewidth_rad_s"] = p.linewidth;
  j["tritter_time_s"] = tritter_time(p);
  return j;
}

json table_json(const ProbabilityTable& t) {
  json j = json::object();
  for (const char* label : ProbabilityTable::kLabels) j[label] = t.at(label);
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void require_json(const ConfigDocument& doc, const char* command) {
  if (!doc.format.empty() && doc.format != "json") {
    throw ConfigError(std::string(command) + " only emits json, got format '" + doc.format + "'");
  }
}

}  // namespace

const char* tool_version() { return ATOMSLIT_VERSION; }

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fringes_csv(const ConfigDocument& doc) {
  const RunConfig config = to_run_config(doc);
  const std::vector<FringePoint> scan = fringe_scan(config, doc.grid.values());
  std::string csv = kFringeHeader;
  csv += '\n';
  for (const FringePoint& pt : scan) {
    csv += format_number(pt.delta_t);
    for (const char* label : ProbabilityTable::kLabels) {
      csv += ',';
      csv += format_number(pt.table.at(label));
    }
    csv += '\n';
  }
  return csv;
}

json fringes_json(const ConfigDocument& doc) {
  const RunConfig config = to_run_config(doc);
  const std::vector<FringePoint> scan = fringe_scan(config, doc.grid.values());
  json j;
  j["command"] = "fringes";
  j["version"] = tool_version();
  j["method"] = std::string(to_string(doc.method));
  j["params"] = params_json(config.params);
  j["points"] = json::array();
  for (const FringePoint& pt : scan) {
    j["points"].push_back({{"delta_T_rad", pt.delta_t}, {"p", table_json(pt.table)}});
  }
  j["config"] = to_json(doc);
  return j;
}

json sorkin_report(const ConfigDocument& doc) {
  const RunConfig config = to_run_config(doc);
  const ProbabilityTable t = probability_table(config);
  json j;
  j["command"] = "sorkin";
  j["version"] = tool_version();
  j["method"] = std::string(to_string(doc.method));
  j["cycles"] = doc.cycles;
  j["params"] = params_json(config.params);
  j["delta_T_rad"] = config.delta_t;
  j["evolution_time_s"] = evolution_time(config);
  j["probabilities"] = table_json(t);
  const double s3 = sorkin_s3(t);
  j["s3"] = s3;
  j["s3_abs"] = std::abs(s3);
  j["s3_nonzero"] = std::abs(s3) > tol::kConstruction;
  j["s2"] = {{"12", s2(t, 1, 2)}, {"13", s2(t, 1, 3)}, {"23", s2(t, 2, 3)}};
  try {
    j["kappa"] = kappa(t);
    j["degenerate"] = nullptr;
  } catch (const DegenerateOperatingPoint& e) {
    j["kappa"] = nullptr;
    j["degenerate"] = {{"quantity", "kappa"},
                       {"s2_abs_sum", kappa_denominator(t)},
                       {"floor", kKappaFloor},
                       {"message", e.what()}};
  }
  j["config"] = to_json(doc);
  return j;
}

json kappa_mc_report(const ConfigDocument& doc) {
  if (!doc.seed) throw ConfigError("kappa-mc requires an explicit seed (--seed)");
  if (doc.repeats == 0) throw ConfigError("repeats must be positive");
  if (doc.events == 0) throw ConfigError("events must be positive");
  const RunConfig config = to_run_config(doc);
  ShotNoiseConfig sn;
  sn.n_events = doc.events;
  sn.n_repeats = doc.repeats;
  sn.seed = *doc.seed;
  sn.threads = doc.threads;
  const KappaEstimate est = kappa_monte_carlo(config, sn);

  json result;
  result["kappa_mean"] = est.mean;
  result["kappa_std"] = est.std;
  result["kappa_exact"] = est.exact_kappa;
  result["s3_mean"] = est.s3_mean;
  result["s3_std"] = est.s3_std;
  result["events_per_config"] = doc.events;
  result["repeats"] = est.repeats;
  result["n_total"] = est.n_total;
  result["seed"] = *doc.seed;
  result["counts"] = json::object();
  for (const char* label : ProbabilityTable::kLabels) {
    result["counts"][label] = est.per_config_counts.at(label);
  }

  json j;
  j["command"] = "kappa-mc";
  j["version"] = tool_version();
  j["timestamp"] = utc_timestamp();
  j["method"] = std::string(to_string(doc.method));
  j["params"] = params_json(config.params);
  j["result"] = result;
  j["config"] = to_json(doc);
  return j;
}

json validate_report(const ConfigDocument& doc) {
  const RunConfig config = to_run_config(doc);
  const PhysicalParams& p = config.params;

  const AdiabaticEliminationReport ae = adiabatic_elimination_error(p);
  json adiabatic;
  adiabatic["infidelity"] = ae.infidelity;
  adiabatic["max_excited_population"] = ae.max_excited_population;
  adiabatic["leakage_scale"] = ae.leakage_scale;
  adiabatic["tritter_time_s"] = ae.tritter_time;
  adiabatic["infidelity_threshold"] = doc.max_infidelity;
  adiabatic["excited_population_threshold"] = 5.0 * ae.leakage_scale;
  const bool ae_pass = ae.infidelity <= doc.max_infidelity &&
                       ae.max_excited_population <= 5.0 * ae.leakage_scale;
  adiabatic["pass"] = ae_pass;

  json rwa;
  rwa["points"] = json::array();
  bool monotone = true;
  bool below = true;
  double previous = INFINITY;
  for (double ratio : doc.rwa_ratios) {
    const FullDrivenHamiltonian h = FullDrivenHamiltonian::from_params(p, ratio * p.detuning);
    const RwaReport r = rwa_error_scaled(h, ae.tritter_time, default_integrator(h));
    rwa["points"].push_back({{"omega1_over_detuning", ratio},
                             {"infidelity", r.infidelity},
                             {"steps", r.steps}});
    if (r.infidelity > doc.max_infidelity) below = false;
    if (r.infidelity >= previous) monotone = false;
    previous = r.infidelity;
  }
  rwa["monotone_decreasing"] = monotone;
  rwa["infidelity_threshold"] = doc.max_infidelity;
  rwa["pass"] = monotone && below;

  json j;
  j["command"] = "validate";
  j["version"] = tool_version();
  j["params"] = params_json(p);
  j["adiabatic_elimination"] = adiabatic;
  j["rwa"] = rwa;
  j["pass"] = ae_pass && monotone && below;
  j["config"] = to_json(doc);
  return j;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write '" + path + "'");
    os << content;
    os.flush();
    if (!os) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("write to '" + path + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move output into '" + path + "': " + ec.message());
  }
}

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> method;
  std::optional<int> cycles;
  std::optional<double> delta_t;
  std::optional<std::string> grid;
  std::optional<double> bias_phi;
  std::optional<std::uint64_t> events;
  std::optional<std::uint64_t> repeats;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  std::optional<std::string> closing;
};

void add_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "JSON config document");
  cmd.add_option("--method", o.method, "erase|dephase|spontaneous");
  cmd.add_option("--cycles", o.cycles, "blocking cycles (spontaneous only)");
  cmd.add_option("--delta-t", o.delta_t, "delta*T in rad");
  cmd.add_option("--grid", o.grid, "MIN:MAX:POINTS in rad");
  cmd.add_option("--bias-phi", o.bias_phi, "coherence bias phase in rad");
  cmd.add_option("--events", o.events, "detection events per configuration");
  cmd.add_option("--repeats", o.repeats, "Monte Carlo repeats");
  cmd.add_option("--seed", o.seed, "RNG seed");
  cmd.add_option("--out", o.out, "output path (default stdout)");
  cmd.add_option("--format", o.format, "csv|json");
  cmd.add_option("--threads", o.threads, "worker threads");
  cmd.add_option("--closing", o.closing, "tritter_inverse|identity");
}

ConfigDocument resolve(const Overrides& o) {
  json doc = json::object();
  if (!o.config_path.empty()) doc = to_json(load_config_file(o.config_path));
  if (o.method) doc["method"] = *o.method;
  if (o.cycles) doc["cycles"] = *o.cycles;
  if (o.delta_t) {
    doc.erase("t_s");
    doc["delta_t_rad"] = *o.delta_t;
  }
  if (o.grid) doc["grid"] = *o.grid;
  if (o.bias_phi) doc["bias_phi_rad"] = *o.bias_phi;
  if (o.events) doc["events"] = *o.events;
  if (o.repeats) doc["repeats"] = *o.repeats;
  if (o.seed) doc["seed"] = *o.seed;
  if (o.out) doc["out"] = *o.out;
  if (o.format) doc["format"] = *o.format;
  if (o.threads) doc["threads"] = *o.threads;
  if (o.closing) doc["closing"] = *o.closing;
  return parse_config(doc);
}

void emit(const ConfigDocument& doc, const std::string& payload, std::ostream& out) {
  if (doc.out.empty() || doc.out == "-") {
    out << payload;
  } else {
    write_atomic(doc.out, payload);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Three-path Ramsey interferometer and Sorkin-parameter simulator", "atomslit"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Overrides o;
  CLI::App* fringes = app.add_subcommand("fringes", "probability fringes over a delta*T grid");
  CLI::App* sorkin = app.add_subcommand("sorkin", "eight probabilities, S3, S2 and kappa");
  CLI::App* kappa_mc = app.add_subcommand("kappa-mc", "shot-noise Monte Carlo for kappa");
  CLI::App* validate = app.add_subcommand("validate", "adiabatic-elimination and RWA checks");
  for (CLI::App* cmd : {fringes, sorkin, kappa_mc, validate}) add_flags(*cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const ConfigDocument doc = resolve(o);
    if (fringes->parsed()) {
      if (doc.format.empty() || doc.format == "csv") {
        emit(doc, fringes_csv(doc), out);
      } else if (doc.format == "json") {
        emit(doc, dump(fringes_json(doc)), out);
      } else {
        throw ConfigError("format must be csv or json, got '" + doc.format + "'");
      }
    } else if (sorkin->parsed()) {
      require_json(doc, "sorkin");
      emit(doc, dump(sorkin_report(doc)), out);
    } else if (kappa_mc->parsed()) {
      require_json(doc, "kappa-mc");
      emit(doc, dump(kappa_mc_report(doc)), out);
    } else if (validate->parsed()) {
      require_json(doc, "validate");
      const json report = validate_report(doc);
      emit(doc, dump(report), out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DegenerateOperatingPoint& e) {
    err << "degenerate operating point: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace atomslit::cli
