#include "atomslit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

namespace atomslit {

namespace odeint = boost::numeric::odeint;

namespace {

using OdeState = std::vector<Complex>;

class SchrodingerRhs {
 public:
  SchrodingerRhs(const HamiltonianSource& h, Eigen::Index dim)
      : h_(h), buf_(ComplexMatrix::Zero(dim, dim)) {}

  void operator()(const OdeState& x, OdeState& dxdt, double t) {
    h_(t, buf_);
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Map<const ComplexVector> psi(x.data(), n);
    Eigen::Map<ComplexVector> out(dxdt.data(), n);
    out.noalias() = Complex(0.0, -1.0) * (buf_ * psi);
  }

 private:
  const HamiltonianSource& h_;
  ComplexMatrix buf_;
};

void fill_full_hamiltonian(const FullDrivenHamiltonian& h, double t, ComplexMatrix& m) {
  m.setZero();
  m(1, 1) = h.zeeman_ground;
  m(2, 2) = 2.0 * h.zeeman_ground;
  m(3, 3) = h.excited_energy();
  for (int j = 0; j < 3; ++j) {
    const double c = h.rabi[j] * std::cos(h.laser_freqs[j] * t);
    m(j, 3) = c;
    m(3, j) = c;
  }
}

// e^{i H0 t} (H(t) - H0) e^{-i H0 t} with H0 = diag(0, delta, 2 delta, omega_1):
// couplings Omega_j cos(omega_j t) e^{i (E_j - omega_1) t}, excited energy Delta.
void fill_interaction_hamiltonian(const FullDrivenHamiltonian& h, double t, ComplexMatrix& m) {
  m.setZero();
  m(3, 3) = h.detuning;
  for (int j = 0; j < 3; ++j) {
    const double c = h.rabi[j] * std::cos(h.laser_freqs[j] * t);
    const Complex coupling = c * std::polar(1.0, (j * h.zeeman_ground - h.transition_freq) * t);
    m(j, 3) = coupling;
    m(3, j) = std::conj(coupling);
  }
}

ComplexVector to_eigen(const OdeState& x) {
  return Eigen::Map<const ComplexVector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

FullDrivenHamiltonian FullDrivenHamiltonian::from_params(const PhysicalParams& p,
                                                         double transition_freq) {
  FullDrivenHamiltonian h;
  h.rabi = {p.rabi, p.rabi, p.rabi};
  h.zeeman_ground = p.zeeman_ground;
  h.detuning = p.detuning;
  h.transition_freq = transition_freq;
  for (int j = 0; j < 3; ++j) {
    const double ground_energy = j * p.zeeman_ground;
    h.laser_freqs[j] = (h.excited_energy() - ground_energy) - p.detuning;
  }
  return h;
}

double FullDrivenHamiltonian::fastest_frequency() const {
  double w = std::abs(excited_energy());
  for (double f : laser_freqs) w = std::max(w, std::abs(f));
  return std::max(w, 2.0 * std::abs(zeeman_ground));
}

void FullDrivenHamiltonian::validate() const {
  for (double r : rabi) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParams("rabi frequencies must be >= 0");
  }
  if (!(detuning != 0.0) || !std::isfinite(detuning)) {
    throw InvalidParams("detuning must be finite and non-zero");
  }
  if (!(transition_freq > 0.0) || !std::isfinite(transition_freq)) {
    throw InvalidParams("transition frequency must be positive");
  }
  for (int j = 0; j < 3; ++j) {
    const double expected = excited_energy() - j * zeeman_ground - detuning;
    if (std::abs(laser_freqs[j] - expected) > 1e-12 * std::abs(expected) + 1e-9) {
      std::ostringstream os;
      os << "laser " << j + 1 << " does not drive its transition at the common detuning";
      throw InvalidParams(os.str());
    }
  }
}

IntegratorConfig IntegratorConfig::fixed(double dt) {
  IntegratorConfig c;
  c.method = Method::rk4;
  c.dt = dt;
  return c;
}

IntegratorConfig IntegratorConfig::adaptive(double rel_tol, double abs_tol) {
  IntegratorConfig c;
  c.method = Method::adaptive;
  c.rel_tol = rel_tol;
  c.abs_tol = abs_tol;
  return c;
}

ComplexMatrix full_hamiltonian_at(const FullDrivenHamiltonian& h, double t) {
  ComplexMatrix m(4, 4);
  fill_full_hamiltonian(h, t, m);
  return m;
}

ComplexMatrix rwa_hamiltonian(const FullDrivenHamiltonian& h) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  for (int j = 0; j < 3; ++j) {
    m(j, 3) = 0.5 * h.rabi[j];
    m(3, j) = 0.5 * h.rabi[j];
  }
  m(3, 3) = h.detuning;
  return m;
}

ComplexVector integrate_schrodinger(const HamiltonianSource& h, const PureState& psi0,
                                    double t_final, const IntegratorConfig& cfg) {
  if (std::abs(psi0.norm() - 1.0) > tol::kConstruction) {
    throw QStateError("integrate_schrodinger: initial state is not normalised");
  }
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw std::invalid_argument("integrate_schrodinger: t_final must be finite and >= 0");
  }
  OdeState x(psi0.amplitudes().data(), psi0.amplitudes().data() + psi0.dim());
  if (t_final == 0.0) return to_eigen(x);
  SchrodingerRhs rhs(h, psi0.dim());

  if (cfg.method == IntegratorConfig::Method::rk4) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("integrate_schrodinger: dt must be positive");
    const double n_real = std::ceil(t_final / cfg.dt - 1e-9);
    if (n_real > static_cast<double>(cfg.max_steps)) {
      throw IntegrationError("integrate_schrodinger: step count exceeds max_steps");
    }
    const auto n = static_cast<std::size_t>(std::max(1.0, n_real));
    const double step = t_final / static_cast<double>(n);
    odeint::runge_kutta4<OdeState> stepper;
    for (std::size_t i = 0; i < n; ++i) {
      stepper.do_step(std::ref(rhs), x, static_cast<double>(i) * step, step);
    }
    return to_eigen(x);
  }

  auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol,
                                         odeint::runge_kutta_dopri5<OdeState>());
  double t = 0.0;
  double dt = cfg.dt > 0.0 ? cfg.dt : t_final * 1e-6;
  const double min_dt = t_final * 1e-15;
  std::size_t attempts = 0;
  while (t < t_final) {
    if (++attempts > cfg.max_steps) {
      throw IntegrationError("integrate_schrodinger: max_steps exceeded");
    }
    const double remaining = t_final - t;
    const bool last = dt >= remaining;
    if (last) dt = remaining;
    if (stepper.try_step(std::ref(rhs), x, t, dt) == odeint::success) {
      if (last) break;
    } else if (dt < min_dt) {
      throw IntegrationError("integrate_schrodinger: step size underflow");
    }
  }
  return to_eigen(x);
}

AdiabaticEliminationReport adiabatic_elimination_error(const PhysicalParams& p, int samples) {
  p.validate();
  if (samples < 1000) throw std::invalid_argument("adiabatic_elimination_error: need >= 1000 samples");
  const double tau = tritter_time(p);
  const FullDrivenHamiltonian full = FullDrivenHamiltonian::from_params(p, 1.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rwa_hamiltonian(full));
  const ComplexMatrix& v = es.eigenvectors();
  const Eigen::VectorXd& w = es.eigenvalues();
  ComplexVector psi0 = ComplexVector::Zero(4);
  psi0(0) = 1.0;
  const ComplexVector coeffs = v.adjoint() * psi0;

  auto evolve = [&](double t) {
    ComplexVector c(4);
    for (int i = 0; i < 4; ++i) c(i) = coeffs(i) * std::polar(1.0, -w(i) * t);
    return ComplexVector(v * c);
  };

  AdiabaticEliminationReport report;
  report.tritter_time = tau;
  report.leakage_scale = std::pow(p.rabi / (2.0 * p.detuning), 2);
  for (int i = 0; i <= samples; ++i) {
    const double t = tau * static_cast<double>(i) / samples;
    report.max_excited_population =
        std::max(report.max_excited_population, std::norm(evolve(t)(3)));
  }

  // Effective model in the same (interaction) picture: the closed-form
  // tritter without Zeeman phases.
  const ComplexVector target = tritter_unitary(0.0).col(0);
  const ComplexVector ground = evolve(tau).head(3);
  report.infidelity = std::max(0.0, 1.0 - std::norm(target.dot(ground)));
  return report;
}

double fastest_frequency(const FullDrivenHamiltonian& h, IntegrationFrame frame) {
  if (frame == IntegrationFrame::schrodinger) return h.fastest_frequency();
  double w = std::abs(h.detuning);
  for (int j = 0; j < 3; ++j) {
    w = std::max(w, std::abs(h.laser_freqs[j]) + std::abs(j * h.zeeman_ground - h.transition_freq));
  }
  return w;
}

IntegratorConfig default_integrator(const FullDrivenHamiltonian& h, IntegrationFrame frame) {
  return IntegratorConfig::fixed(kTwoPi / fastest_frequency(h, frame) / kDefaultStepsPerPeriod);
}

ComplexMatrix interaction_hamiltonian_at(const FullDrivenHamiltonian& h, double t) {
  ComplexMatrix m(4, 4);
  fill_interaction_hamiltonian(h, t, m);
  return m;
}

RwaReport rwa_error_scaled(const FullDrivenHamiltonian& h, double t_final,
                           const IntegratorConfig& cfg, IntegrationFrame frame) {
  h.validate();
  if (h.transition_freq < 20.0 * std::abs(h.detuning)) {
    throw std::invalid_argument("rwa_error_scaled: transition frequency must be >= 20 Delta");
  }
  const double max_dt = kTwoPi / fastest_frequency(h, frame) / 20.0;
  if (cfg.method == IntegratorConfig::Method::rk4 && cfg.dt > max_dt) {
    std::ostringstream os;
    os << "rwa_error_scaled: dt = " << cfg.dt << " s does not resolve the fastest frequency"
       << " (need dt <= " << max_dt << " s)";
    throw IntegrationError(os.str());
  }

  const PureState psi0 = PureState::basis(4, 0);
  ComplexVector interaction;
  if (frame == IntegrationFrame::schrodinger) {
    const HamiltonianSource source = [&h](double t, ComplexMatrix& m) {
      fill_full_hamiltonian(h, t, m);
    };
    const ComplexVector schrodinger = integrate_schrodinger(source, psi0, t_final, cfg);
    // Interaction picture w.r.t. H0 = diag(0, delta, 2 delta, omega_1).
    const std::array<double, 4> base = {0.0, h.zeeman_ground, 2.0 * h.zeeman_ground,
                                        h.transition_freq};
    interaction.resize(4);
    for (int i = 0; i < 4; ++i) {
      interaction(i) = std::polar(1.0, base[i] * t_final) * schrodinger(i);
    }
  } else {
    const HamiltonianSource source = [&h](double t, ComplexMatrix& m) {
      fill_interaction_hamiltonian(h, t, m);
    };
    interaction = integrate_schrodinger(source, psi0, t_final, cfg);
  }

  const ComplexVector rwa = matrix_exponential(rwa_hamiltonian(h), t_final) * psi0.amplitudes();

  RwaReport report;
  report.transition_freq = h.transition_freq;
  report.t_final = t_final;
  report.steps = cfg.method == IntegratorConfig::Method::rk4
                     ? static_cast<std::size_t>(std::ceil(t_final / cfg.dt - 1e-9))
                     : 0;
  report.infidelity = std::max(0.0, 1.0 - std::norm(rwa.dot(interaction)));
  return report;
}

}  // namespace atomslit
