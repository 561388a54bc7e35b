// Shot noise, kappa precision and systematic-bias studies.
//
// Randomness is organised in substreams keyed by (seed, a, b): every
// (configuration, repeat) pair owns its own generator, so results do not
// depend on how the work is split across threads.

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "atomslit/protocol.hpp"

namespace atomslit {

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Binomial(n, p) by inversion when n * min(p, 1 - p) <= 30, BTRS otherwise.
std::uint64_t binomial_sample(double p, std::uint64_t n, RngStream& rng);

struct ShotNoiseConfig {
  std::uint64_t n_events = 0;   // detection trials per configuration
  std::uint64_t n_repeats = 0;  // Monte Carlo replications
  std::uint64_t seed = 0;
  bool exact = false;  // use the exact probabilities (N -> infinity)
  unsigned threads = 1;

  void validate() const;
};

struct KappaEstimate {
  double mean = 0.0;
  double std = 0.0;
  double s3_mean = 0.0;
  double s3_std = 0.0;
  double exact_kappa = 0.0;
  std::uint64_t n_total = 0;
  std::uint64_t repeats = 0;
  // Clicks per open-set label, summed over repeats.
  std::map<std::string, std::uint64_t> per_config_counts;
};

KappaEstimate kappa_monte_carlo(const RunConfig& config, const ShotNoiseConfig& sn);

// sigma_kappa(N) = constant / sqrt(N) with the constant measured once by
// Monte Carlo at reference_events.
struct CampaignCalibration {
  double constant = 0.0;
  std::uint64_t reference_events = 0;
  std::uint64_t repeats = 0;
  std::uint64_t seed = 0;
  double reference_std = 0.0;
};

CampaignCalibration calibrate_campaign(const RunConfig& config, const ShotNoiseConfig& sn);
double campaign_projection(const CampaignCalibration& calibration, std::uint64_t atoms_per_run,
                           std::uint64_t runs);

struct BiasPoint {
  double phi;
  double s3;
};

struct BiasStudy {
  std::vector<BiasPoint> points;
  double slope_at_zero = 0.0;  // central difference at |phi| = kBiasSlopeStep
};
inline constexpr double kBiasSlopeStep = 1e-6;

BiasStudy bias_study(const RunConfig& config, const std::vector<double>& phi_grid);

struct PhaseNoiseEstimate {
  double s3 = 0.0;
  double standard_error = 0.0;
  std::uint64_t draws = 0;
};

// Each of the eight runs gets its own uniform random tritter phases
// (phi2, phi3) in [0, 2 pi); the eight averaged probabilities give S3.
PhaseNoiseEstimate random_tritter_phase_s3(const RunConfig& config, std::uint64_t draws,
                                           std::uint64_t seed);

// Ordinary least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace atomslit
