#include "atomslit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace atomslit {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  KahanSum sum;
  for (double x : xs) sum.add(x);
  out.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  KahanSum sq;
  for (double x : xs) sq.add((x - out.mean) * (x - out.mean));
  out.std = std::sqrt(sq.value() / static_cast<double>(xs.size() - 1));
  return out;
}

std::uint64_t binomial_inversion(double p, std::uint64_t n, RngStream& rng) {
  const double q = 1.0 - p;
  const double qn = std::exp(static_cast<double>(n) * std::log1p(-p));
  const double np = static_cast<double>(n) * p;
  const double bound = std::min(static_cast<double>(n), np + 10.0 * std::sqrt(np * q + 1.0));
  std::uint64_t x = 0;
  double px = qn;
  double u = rng.uniform();
  while (u > px) {
    ++x;
    if (static_cast<double>(x) > bound) {
      x = 0;
      px = qn;
      u = rng.uniform();
    } else {
      u -= px;
      px *= (static_cast<double>(n - x + 1) * p) / (static_cast<double>(x) * q);
    }
  }
  return x;
}

// Hormann's transformed rejection with squeeze (BTRS), valid for n p >= 10.
std::uint64_t binomial_btrs(double p, std::uint64_t n, RngStream& rng) {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double vr = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double m = std::floor((nd + 1.0) * p);
  const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > nd) continue;
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) + (k - m) * lpq) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

// Runs body(i) for i in [0, n) on up to `threads` workers.
template <typename Body>
void parallel_for(std::uint64_t n, unsigned threads, Body body) {
  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::uint64_t>(threads == 0 ? 1 : threads, 1, std::max<std::uint64_t>(n, 1)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t i = w; i < n; i += workers) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  state = key ^ (stream_a * 0xd1342543de82ef95ULL);
  key = splitmix64(state);
  state = key ^ (stream_b * 0xaf251af3b0f025b5ULL);
  engine_.seed(splitmix64(state));
}

std::uint64_t binomial_sample(double p, std::uint64_t n, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_sample: p outside [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial_sample(1.0 - p, n, rng);
  if (static_cast<double>(n) * p <= 30.0) return binomial_inversion(p, n, rng);
  return binomial_btrs(p, n, rng);
}

void ShotNoiseConfig::validate() const {
  if (n_repeats == 0) throw std::invalid_argument("ShotNoiseConfig: repeats must be positive");
  if (!exact && n_events == 0) {
    throw std::invalid_argument("ShotNoiseConfig: events must be positive");
  }
}

KappaEstimate kappa_monte_carlo(const RunConfig& config, const ShotNoiseConfig& sn) {
  sn.validate();
  const ProbabilityTable exact = probability_table(config);
  KappaEstimate est;
  est.exact_kappa = kappa(exact);
  est.repeats = sn.n_repeats;
  if (sn.exact) {
    est.mean = est.exact_kappa;
    est.s3_mean = sorkin_s3(exact);
    return est;
  }

  std::vector<double> kappas(sn.n_repeats);
  std::vector<double> s3s(sn.n_repeats);
  std::vector<std::array<std::uint64_t, 8>> counts(sn.n_repeats);
  const double n_events = static_cast<double>(sn.n_events);

  parallel_for(sn.n_repeats, sn.threads, [&](std::uint64_t repeat) {
    ProbabilityTable empirical;
    for (unsigned mask = 0; mask < 8; ++mask) {
      const LevelSet open = LevelSet::from_mask(mask);
      RngStream rng(sn.seed, mask, repeat);
      const std::uint64_t k = binomial_sample(exact.at(open), sn.n_events, rng);
      counts[repeat][mask] = k;
      empirical.set(open, static_cast<double>(k) / n_events);
    }
    s3s[repeat] = sorkin_s3(empirical);
    kappas[repeat] = kappa(empirical);
  });

  const MeanStd k = mean_std(kappas);
  const MeanStd s = mean_std(s3s);
  est.mean = k.mean;
  est.std = k.std;
  est.s3_mean = s.mean;
  est.s3_std = s.std;
  est.n_total = sn.n_events * 8 * sn.n_repeats;
  for (unsigned mask = 0; mask < 8; ++mask) {
    std::uint64_t total = 0;
    for (const auto& c : counts) total += c[mask];
    est.per_config_counts[LevelSet::from_mask(mask).label()] = total;
  }
  return est;
}

CampaignCalibration calibrate_campaign(const RunConfig& config, const ShotNoiseConfig& sn) {
  if (sn.exact) throw std::invalid_argument("calibrate_campaign: needs shot noise");
  const KappaEstimate est = kappa_monte_carlo(config, sn);
  CampaignCalibration c;
  c.reference_events = sn.n_events;
  c.repeats = sn.n_repeats;
  c.seed = sn.seed;
  c.reference_std = est.std;
  c.constant = est.std * std::sqrt(static_cast<double>(sn.n_events));
  return c;
}

double campaign_projection(const CampaignCalibration& calibration, std::uint64_t atoms_per_run,
                           std::uint64_t runs) {
  if (atoms_per_run == 0 || runs == 0) {
    throw std::invalid_argument("campaign_projection: inputs must be positive");
  }
  return calibration.constant /
         std::sqrt(static_cast<double>(atoms_per_run) * static_cast<double>(runs));
}

BiasStudy bias_study(const RunConfig& config, const std::vector<double>& phi_grid) {
  auto s3_at = [&](double phi) {
    RunConfig c = config;
    c.bias_phi = phi;
    return sorkin_s3(probability_table(c));
  };
  BiasStudy study;
  study.points.reserve(phi_grid.size());
  for (double phi : phi_grid) {
    if (std::abs(phi) > 0.1) throw std::invalid_argument("bias_study: |phi| must be <= 0.1");
    study.points.push_back({phi, s3_at(phi)});
  }
  study.slope_at_zero = (s3_at(kBiasSlopeStep) - s3_at(-kBiasSlopeStep)) / (2.0 * kBiasSlopeStep);
  return study;
}

PhaseNoiseEstimate random_tritter_phase_s3(const RunConfig& config, std::uint64_t draws,
                                           std::uint64_t seed) {
  if (draws < 2) throw std::invalid_argument("random_tritter_phase_s3: need at least 2 draws");
  config.validate();
  PhaseNoiseEstimate out;
  out.draws = draws;
  KahanSum s3;
  KahanSum variance;
  for (unsigned mask = 0; mask < 8; ++mask) {
    const LevelSet open = LevelSet::from_mask(mask);
    RngStream rng(seed, mask);
    std::vector<double> p(draws);
    RunConfig c = config;
    for (std::uint64_t d = 0; d < draws; ++d) {
      const double phi2 = kTwoPi * rng.uniform();
      const double phi3 = kTwoPi * rng.uniform();
      c.prepared_state = imperfect_tritter_state(config.params, phi2, phi3);
      p[d] = run_single(c, open);
    }
    const MeanStd ms = mean_std(p);
    // Sign of P_S in S3 is (-1)^(number of blocked levels).
    const double sign = (open.complement().size() % 2 == 0) ? 1.0 : -1.0;
    s3.add(sign * ms.mean);
    variance.add(ms.std * ms.std / static_cast<double>(draws));
  }
  out.s3 = s3.value();
  out.standard_error = std::sqrt(variance.value());
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need two equally sized series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: non-positive value");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_slope: x values are all equal");
  return sxy / sxx;
}

}  // namespace atomslit
