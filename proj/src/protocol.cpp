#include "atomslit/protocol.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace atomslit {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

}  // namespace

ProbabilityTable::ProbabilityTable() { p_.fill(kMissing); }

ProbabilityTable ProbabilityTable::from_map(const std::map<std::string, double>& values) {
  ProbabilityTable t;
  for (const auto& [label, p] : values) t.set(LevelSet::parse(label), p);
  return t;
}

void ProbabilityTable::set(LevelSet open, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "ProbabilityTable: P_" << open.label() << " = " << p << " outside [0, 1]";
    throw std::invalid_argument(os.str());
  }
  p_[open.mask()] = p;
}

bool ProbabilityTable::has(LevelSet open) const { return !std::isnan(p_[open.mask()]); }

double ProbabilityTable::at(LevelSet open) const {
  if (!has(open)) throw MissingEntry("ProbabilityTable: missing P_" + open.label());
  return p_[open.mask()];
}

std::map<std::string, double> ProbabilityTable::to_map() const {
  std::map<std::string, double> out;
  for (unsigned mask = 0; mask < 8; ++mask) {
    const LevelSet s = LevelSet::from_mask(mask);
    if (has(s)) out[s.label()] = p_[mask];
  }
  return out;
}

void RunConfig::validate() const {
  params.validate();
  if (cycles < 1) throw std::invalid_argument("RunConfig: cycles must be >= 1");
  if (cycles > 1 && method != BlockMethod::spontaneous) {
    throw std::invalid_argument("RunConfig: repeated cycles need the spontaneous method");
  }
  if (!std::isfinite(delta_t)) throw std::invalid_argument("RunConfig: delta_t must be finite");
  if (!std::isfinite(bias_phi)) throw std::invalid_argument("RunConfig: bias_phi must be finite");
  if (closing && (closing->rows() != 3 || !is_unitary(*closing))) {
    throw std::invalid_argument("RunConfig: closing operator must be a 3x3 unitary");
  }
  if (initial_state && initial_state->dim() != 3) {
    throw std::invalid_argument("RunConfig: initial state must be 3-dimensional");
  }
  if (measurement && (measurement->dim() != 3 ||
                      std::abs(measurement->norm() - 1.0) > tol::kConstruction)) {
    throw std::invalid_argument("RunConfig: measurement must be a normalised 3-vector");
  }
  if (prepared_state && prepared_state->dim() != 3) {
    throw std::invalid_argument("RunConfig: prepared state must be 3-dimensional");
  }
}

ComplexMatrix RunConfig::closing_unitary() const {
  if (closing) return *closing;
  return tritter_unitary(params).adjoint();
}

DensityMatrix RunConfig::prepared() const {
  if (prepared_state) return DensityMatrix::from_pure(*prepared_state);
  const DensityMatrix rho0 = initial_state ? *initial_state : DensityMatrix::basis(3, 0);
  return apply_unitary(rho0, tritter_unitary(params));
}

double evolution_time(const RunConfig& config) {
  return config.delta_t / config.params.zeeman_ground;
}

namespace {

double detect(const RunConfig& config, const DensityMatrix& prepared, LevelSet open,
              const ComplexMatrix& free, const ComplexMatrix& closing,
              const PureState& measurement) {
  BlockerSpec spec;
  spec.method = config.method;
  spec.blocked = open.complement();
  spec.cycles = config.cycles;
  spec.coherence_bias_rad = config.bias_phi;
  DensityMatrix rho = apply_blocker(prepared, spec, config.params.branching);
  rho = apply_unitary(rho, free);
  rho = apply_unitary(rho, closing);
  return project_probability(rho, measurement);
}

PureState default_measurement(const RunConfig& config) {
  return config.measurement ? *config.measurement : PureState::basis(3, 0);
}

}  // namespace

double run_single(const RunConfig& config, LevelSet open) {
  config.validate();
  return detect(config, config.prepared(), open, free_evolution_phase(config.delta_t),
                config.closing_unitary(), default_measurement(config));
}

ProbabilityTable probability_table(const RunConfig& config) {
  config.validate();
  const DensityMatrix prepared = config.prepared();
  const ComplexMatrix free = free_evolution_phase(config.delta_t);
  const ComplexMatrix closing = config.closing_unitary();
  const PureState m = default_measurement(config);
  ProbabilityTable t;
  for (unsigned mask = 0; mask < 8; ++mask) {
    const LevelSet open = LevelSet::from_mask(mask);
    t.set(open, detect(config, prepared, open, free, closing, m));
  }
  return t;
}

double sorkin_s3(const ProbabilityTable& t) {
  return t.at("123") - t.at("12") - t.at("13") - t.at("23") + t.at("1") + t.at("2") +
         t.at("3") - t.at("0");
}

double s2(const ProbabilityTable& t, int j, int k) {
  if (j == k) throw std::invalid_argument("s2: levels must differ");
  const LevelSet pair{j, k};
  return t.at(pair) - t.at(LevelSet{j}) - t.at(LevelSet{k}) + t.at(LevelSet::none());
}

double kappa_denominator(const ProbabilityTable& t) {
  return std::abs(s2(t, 1, 2)) + std::abs(s2(t, 1, 3)) + std::abs(s2(t, 2, 3));
}

double kappa(const ProbabilityTable& t) {
  const double denominator = kappa_denominator(t);
  if (denominator < kKappaFloor) {
    std::ostringstream os;
    os << "kappa: sum of |S2| = " << denominator
       << " is below the floor; choose a delta*T away from the fringe nodes";
    throw DegenerateOperatingPoint(os.str());
  }
  return sorkin_s3(t) / denominator;
}

std::vector<FringePoint> fringe_scan(const RunConfig& config, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("fringe_scan: empty grid");
  std::vector<FringePoint> out;
  out.reserve(grid.size());
  RunConfig point = config;
  for (double x : grid) {
    point.delta_t = x;
    out.push_back({x, probability_table(point)});
  }
  return out;
}

PureState imperfect_tritter_state(const PhysicalParams& p, double phi2, double phi3) {
  const double zeeman_phase = p.zeeman_ground * tritter_time(p);
  const Complex eta = std::polar(1.0, kTwoPi / 3.0);
  const double norm = 1.0 / std::sqrt(3.0);
  ComplexVector v(3);
  v(0) = norm;
  v(1) = norm * eta * std::polar(1.0, zeeman_phase + phi2);
  v(2) = norm * eta * std::polar(1.0, 2.0 * zeeman_phase + phi3);
  return PureState(std::move(v));
}

double tritter_phase_systematic(const RunConfig& config, double phi2, double phi3) {
  RunConfig c = config;
  c.prepared_state = imperfect_tritter_state(config.params, phi2, phi3);
  return sorkin_s3(probability_table(c));
}

}  // namespace atomslit
