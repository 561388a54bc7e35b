// The three-path Ramsey interferometer: prepare, tritter, block, free
// evolution, closing tritter, detect.
//
// Labeling convention: P_S is the click probability with the levels in S
// OPEN. The blocker acts on the complement of S, so P_12 means level 3 is
// blocked and P_0 means every level is blocked.

#pragma once

#include <array>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "atomslit/blockers.hpp"
#include "atomslit/qstate.hpp"
#include "atomslit/tripod.hpp"

namespace atomslit {

// Far from every fringe node: S2(12) = S2(23) = 1/9, S2(13) = -1/9 there.
inline constexpr double kDefaultOperatingPoint = std::numbers::pi / 3.0;

class DegenerateOperatingPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingEntry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ProbabilityTable {
 public:
  // Labels in the conventional reporting order.
  static constexpr std::array<const char*, 8> kLabels = {"123", "12", "13", "23",
                                                         "1",   "2",  "3",  "0"};

  ProbabilityTable();

  static ProbabilityTable from_map(const std::map<std::string, double>& values);

  void set(LevelSet open, double p);
  bool has(LevelSet open) const;
  // Throws MissingEntry when the configuration was never filled in.
  double at(LevelSet open) const;
  double at(std::string_view label) const { return at(LevelSet::parse(label)); }

  std::map<std::string, double> to_map() const;

 private:
  std::array<double, 8> p_;
};

struct RunConfig {
  PhysicalParams params = default_params();
  BlockMethod method = BlockMethod::erase;
  int cycles = 1;
  double delta_t = kDefaultOperatingPoint;  // delta * T, rad
  double bias_phi = 0.0;
  std::optional<ComplexMatrix> closing;        // defaults to U_tau^dagger
  std::optional<DensityMatrix> initial_state;  // defaults to |1><1|
  std::optional<PureState> measurement;        // defaults to |1>
  // Replaces U_tau rho0 U_tau^dagger when set (imperfect tritter studies).
  std::optional<PureState> prepared_state;

  void validate() const;
  ComplexMatrix closing_unitary() const;
  DensityMatrix prepared() const;
};

// Physical free-evolution time corresponding to delta_t.
double evolution_time(const RunConfig& config);

double run_single(const RunConfig& config, LevelSet open);
ProbabilityTable probability_table(const RunConfig& config);

double sorkin_s3(const ProbabilityTable& t);
// S2(jk) = P_jk - P_j - P_k + P_0, j and k 1-based and distinct.
double s2(const ProbabilityTable& t, int j, int k);
double kappa_denominator(const ProbabilityTable& t);
// Throws DegenerateOperatingPoint when the S2 sum is below kKappaFloor.
double kappa(const ProbabilityTable& t);
inline constexpr double kKappaFloor = 1e-9;

struct FringePoint {
  double delta_t;
  ProbabilityTable table;
};
std::vector<FringePoint> fringe_scan(const RunConfig& config, const std::vector<double>& grid);

// Post-tritter state 3^{-1/2}(|1> + eta e^{i delta tau} e^{i phi2}|2>
// + eta e^{2 i delta tau} e^{i phi3}|3>).
PureState imperfect_tritter_state(const PhysicalParams& p, double phi2, double phi3);

// S3 with the imperfect tritter state used in all eight runs.
double tritter_phase_systematic(const RunConfig& config, double phi2, double phi3);

}  // namespace atomslit
