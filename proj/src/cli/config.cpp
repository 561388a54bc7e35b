#include "atomslit/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace atomslit::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "rabi_hz",        "detuning_hz",   "linewidth_hz",  "zeeman_ground_hz", "zeeman_excited_hz",
    "b_field_t",      "lande_ground",  "lande_excited", "branching",        "method",
    "cycles",         "bias_phi_rad",  "delta_t_rad",   "t_s",              "grid",
    "closing",        "events",        "repeats",       "seed",             "threads",
    "out",            "format",        "rwa_ratios",    "max_infidelity"};

double number(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("config key '") + key + "' is not finite");
  return x;
}

std::uint64_t count(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                  !v.is_number_unsigned())) {
    throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string text(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
  return v.get<std::string>();
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(x)) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  }
}

}  // namespace

GridSpec GridSpec::parse(const std::string& spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string::npos ? first : spec.find(':', first + 1);
  if (second == std::string::npos || spec.find(':', second + 1) != std::string::npos) {
    throw ConfigError("grid must look like MIN:MAX:POINTS, got '" + spec + "'");
  }
  GridSpec g;
  g.min = parse_double(spec.substr(0, first), "grid minimum");
  g.max = parse_double(spec.substr(first + 1, second - first - 1), "grid maximum");
  const std::string pts = spec.substr(second + 1);
  std::uint64_t n = 0;
  const auto [ptr, ec] = std::from_chars(pts.data(), pts.data() + pts.size(), n);
  if (ec != std::errc() || ptr != pts.data() + pts.size()) {
    throw ConfigError("grid point count must be an integer, got '" + pts + "'");
  }
  g.points = static_cast<std::size_t>(n);
  if (g.points == 0) throw ConfigError("grid must have at least one point");
  if (g.points > 1 && !(g.max > g.min)) throw ConfigError("grid maximum must exceed its minimum");
  return g;
}

std::string GridSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << min << ':' << max << ':' << points;
  return os.str();
}

std::vector<double> GridSpec::values() const {
  if (points == 0) throw ConfigError("grid must have at least one point");
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = min;
    return v;
  }
  const double step = (max - min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) v[i] = min + step * static_cast<double>(i);
  v.back() = max;
  return v;
}

PhysicalParams ParamsDocument::to_params() const {
  PhysicalParams p = default_params();
  p.rabi = kTwoPi * rabi_hz;
  p.detuning = kTwoPi * detuning_hz;
  p.linewidth = kTwoPi * linewidth_hz;
  p.b_field = b_field_t;
  p.lande_ground = lande_ground;
  p.lande_excited = lande_excited;
  if (zeeman_ground_hz) {
    p.zeeman_ground = kTwoPi * *zeeman_ground_hz;
  } else if (b_field_t) {
    p.zeeman_ground = zeeman_splitting(*b_field_t, lande_ground);
  }
  if (zeeman_excited_hz) {
    p.zeeman_excited = kTwoPi * *zeeman_excited_hz;
  } else if (b_field_t) {
    p.zeeman_excited = zeeman_splitting(*b_field_t, lande_excited);
  }
  p.branching = branching;
  return p;
}

ConfigDocument parse_config(const json& input) {
  if (!input.is_object()) throw ConfigError("config document must be a JSON object");
  if (input.contains("config") && input.at("config").is_object()) {
    return parse_config(input.at("config"));
  }
  for (const auto& [key, value] : input.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  ConfigDocument c;
  ParamsDocument& p = c.params;
  try {
    if (input.contains("rabi_hz")) p.rabi_hz = number(input, "rabi_hz");
    if (input.contains("detuning_hz")) p.detuning_hz = number(input, "detuning_hz");
    if (input.contains("linewidth_hz")) p.linewidth_hz = number(input, "linewidth_hz");
    if (input.contains("zeeman_ground_hz")) p.zeeman_ground_hz = number(input, "zeeman_ground_hz");
    if (input.contains("zeeman_excited_hz")) {
      p.zeeman_excited_hz = number(input, "zeeman_excited_hz");
    }
    if (input.contains("b_field_t")) p.b_field_t = number(input, "b_field_t");
    if (input.contains("lande_ground")) p.lande_ground = number(input, "lande_ground");
    if (input.contains("lande_excited")) p.lande_excited = number(input, "lande_excited");
    if (input.contains("branching")) {
      const json& b = input.at("branching");
      if (!b.is_array() || b.size() != 3) throw ConfigError("branching must be a 3x3 array");
      for (std::size_t k = 0; k < 3; ++k) {
        if (!b[k].is_array() || b[k].size() != 3) throw ConfigError("branching must be a 3x3 array");
        for (std::size_t j = 0; j < 3; ++j) {
          if (!b[k][j].is_number()) throw ConfigError("branching entries must be numbers");
          p.branching.r[k][j] = b[k][j].get<double>();
        }
      }
    }
    if (input.contains("method")) c.method = parse_block_method(text(input, "method"));
    if (input.contains("cycles")) {
      const std::uint64_t n = count(input, "cycles");
      if (n < 1 || n > 1000) throw ConfigError("cycles must be between 1 and 1000");
      c.cycles = static_cast<int>(n);
    }
    if (input.contains("bias_phi_rad")) c.bias_phi = number(input, "bias_phi_rad");
    if (input.contains("delta_t_rad") && input.contains("t_s")) {
      throw ConfigError("give either delta_t_rad or t_s, not both");
    }
    if (input.contains("delta_t_rad")) c.delta_t = number(input, "delta_t_rad");
    if (input.contains("t_s")) {
      c.t_s = number(input, "t_s");
      if (*c.t_s < 0.0) throw ConfigError("t_s must be non-negative");
    }
    if (input.contains("grid")) c.grid = GridSpec::parse(text(input, "grid"));
    if (input.contains("closing")) {
      const std::string k = text(input, "closing");
      if (k == "tritter_inverse") {
        c.closing = ClosingKind::tritter_inverse;
      } else if (k == "identity") {
        c.closing = ClosingKind::identity;
      } else {
        throw ConfigError("closing must be 'tritter_inverse' or 'identity', got '" + k + "'");
      }
    }
    if (input.contains("events")) c.events = count(input, "events");
    if (input.contains("repeats")) c.repeats = count(input, "repeats");
    if (input.contains("seed")) c.seed = count(input, "seed");
    if (input.contains("threads")) c.threads = static_cast<unsigned>(count(input, "threads"));
    if (input.contains("out")) c.out = text(input, "out");
    if (input.contains("format")) c.format = text(input, "format");
    if (input.contains("rwa_ratios")) {
      const json& r = input.at("rwa_ratios");
      if (!r.is_array() || r.empty()) throw ConfigError("rwa_ratios must be a non-empty array");
      c.rwa_ratios.clear();
      for (const auto& x : r) {
        if (!x.is_number()) throw ConfigError("rwa_ratios entries must be numbers");
        c.rwa_ratios.push_back(x.get<double>());
      }
    }
    if (input.contains("max_infidelity")) c.max_infidelity = number(input, "max_infidelity");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ConfigDocument load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ConfigDocument& c) {
  json j;
  const ParamsDocument& p = c.params;
  j["rabi_hz"] = p.rabi_hz;
  j["detuning_hz"] = p.detuning_hz;
  j["linewidth_hz"] = p.linewidth_hz;
  if (p.zeeman_ground_hz) j["zeeman_ground_hz"] = *p.zeeman_ground_hz;
  if (p.zeeman_excited_hz) j["zeeman_excited_hz"] = *p.zeeman_excited_hz;
  if (p.b_field_t) j["b_field_t"] = *p.b_field_t;
  j["lande_ground"] = p.lande_ground;
  j["lande_excited"] = p.lande_excited;
  j["branching"] = json::array();
  for (const auto& row : p.branching.r) j["branching"].push_back({row[0], row[1], row[2]});
  j["method"] = std::string(to_string(c.method));
  j["cycles"] = c.cycles;
  j["bias_phi_rad"] = c.bias_phi;
  if (c.t_s) {
    j["t_s"] = *c.t_s;
  } else {
    j["delta_t_rad"] = c.delta_t;
  }
  j["grid"] = c.grid.to_string();
  j["closing"] = c.closing == ClosingKind::identity ? "identity" : "tritter_inverse";
  j["events"] = c.events;
  j["repeats"] = c.repeats;
  if (c.seed) j["seed"] = *c.seed;
  j["threads"] = c.threads;
  if (!c.out.empty()) j["out"] = c.out;
  if (!c.format.empty()) j["format"] = c.format;
  j["rwa_ratios"] = c.rwa_ratios;
  j["max_infidelity"] = c.max_infidelity;
  return j;
}

RunConfig to_run_config(const ConfigDocument& c) {
  RunConfig r;
  r.params = c.params.to_params();
  try {
    r.params.validate();
  } catch (const InvalidParams& e) {
    throw ConfigError(std::string("invalid physical parameters: ") + e.what());
  }
  r.method = c.method;
  r.cycles = c.cycles;
  if (c.cycles > 1 && c.method != BlockMethod::spontaneous) {
    throw ConfigError("cycles > 1 requires method 'spontaneous'");
  }
  r.bias_phi = c.bias_phi;
  r.delta_t = c.t_s ? r.params.zeeman_ground * *c.t_s : c.delta_t;
  if (c.closing == ClosingKind::identity) r.closing = ComplexMatrix::Identity(3, 3);
  return r;
}

}  // namespace atomslit::cli
