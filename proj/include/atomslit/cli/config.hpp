// Configuration documents for the command-line tool.
//
// A document is a JSON object. Frequencies carry an `_hz` suffix and are
// ordinary frequencies; they are multiplied by 2 pi once, here. Keys that are
// absent fall back to default_params() and the defaults below; unknown keys
// are rejected.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomslit/protocol.hpp"

namespace atomslit::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double min = 0.0;
  double max = 4.0 * std::numbers::pi;
  std::size_t points = 400;

  // "MIN:MAX:POINTS"
  static GridSpec parse(const std::string& text);
  std::string to_string() const;
  // Inclusive, evenly spaced.
  std::vector<double> values() const;
};

enum class ClosingKind { tritter_inverse, identity };

// Physical parameters as written in the document. Conversion to rad/s
// happens in to_run_config, so an echoed document reproduces a run exactly.
struct ParamsDocument {
  double rabi_hz = 0.1e6;
  double detuning_hz = 1.0e6;
  double linewidth_hz = 7.5e3;
  // When absent: derived from b_field_t and the Lande factor if a field is
  // given, otherwise the 87Sr defaults.
  std::optional<double> zeeman_ground_hz;
  std::optional<double> zeeman_excited_hz;
  std::optional<double> b_field_t;
  double lande_ground = -1.3e-4;
  double lande_excited = 2.0 / 33.0;
  BranchingMatrix branching = BranchingMatrix::strontium87();

  PhysicalParams to_params() const;
};

struct ConfigDocument {
  ParamsDocument params;
  BlockMethod method = BlockMethod::erase;
  int cycles = 1;
  double bias_phi = 0.0;
  double delta_t = kDefaultOperatingPoint;
  std::optional<double> t_s;  // overrides delta_t with delta * t_s
  GridSpec grid;
  ClosingKind closing = ClosingKind::tritter_inverse;
  std::uint64_t events = 1'000'000;
  std::uint64_t repeats = 200;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out;     // empty: stdout
  std::string format;  // empty: command default
  // Surrogate optical frequencies for the RWA check, in units of Delta.
  std::vector<double> rwa_ratios = {25.0, 50.0, 100.0, 200.0, 400.0};
  // Validation thresholds.
  double max_infidelity = 1e-2;
};

// Parses a document (or the "config" member of an emitted report).
ConfigDocument parse_config(const nlohmann::json& doc);
ConfigDocument load_config_file(const std::string& path);

// Complete echo: parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ConfigDocument& c);

RunConfig to_run_config(const ConfigDocument& c);

}  // namespace atomslit::cli
