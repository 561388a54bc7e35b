// Experiment commands behind the `atomslit` executable.
//
// Each command turns a ConfigDocument into a payload (CSV text or a JSON
// report). Writing, flag parsing and exit codes live in run().

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "atomslit/cli/config.hpp"

namespace atomslit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitDegenerate = 3,
  kExitIo = 4,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* tool_version();

inline constexpr const char* kFringeHeader = "delta_T_rad,p_123,p_12,p_13,p_23,p_1,p_2,p_3,p_0";

// 12 significant digits.
std::string format_number(double x);

std::string fringes_csv(const ConfigDocument& doc);
nlohmann::json fringes_json(const ConfigDocument& doc);

nlohmann::json sorkin_report(const ConfigDocument& doc);

// Requires doc.seed. The "timestamp" field is the only non-deterministic one.
nlohmann::json kappa_mc_report(const ConfigDocument& doc);

nlohmann::json validate_report(const ConfigDocument& doc);

// Writes to path through a temporary file in the same directory and a rename.
void write_atomic(const std::string& path, const std::string& content);

// Full command-line entry point. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atomslit::cli
