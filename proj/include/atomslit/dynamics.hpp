// Four-level (tripod + excited) dynamics used to check the reduction to the
// effective three-level tritter: rotating-wave approximation and adiabatic
// elimination are validated separately.

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>

#include "atomslit/qstate.hpp"
#include "atomslit/tripod.hpp"

namespace atomslit {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Driven four-level Hamiltonian, basis (|1>, |2>, |3>, |e>) with energies
// (0, delta, 2 delta, transition_freq + Delta).
struct FullDrivenHamiltonian {
  std::array<double, 3> rabi{};
  std::array<double, 3> laser_freqs{};
  double zeeman_ground = 0.0;
  double detuning = 0.0;
  double transition_freq = 0.0;  // omega_1, laser 1 frequency

  // Equal Rabi frequencies from p; laser j drives |j> -> |e> at detuning
  // Delta, i.e. omega_j = omega_1 - (j - 1) delta.
  static FullDrivenHamiltonian from_params(const PhysicalParams& p, double transition_freq);

  double excited_energy() const { return transition_freq + detuning; }
  double fastest_frequency() const;
  void validate() const;
};

struct IntegratorConfig {
  enum class Method { rk4, adaptive };
  Method method = Method::rk4;
  double dt = 0.0;        // rk4 step
  double rel_tol = 1e-10;  // adaptive
  double abs_tol = 1e-12;
  std::size_t max_steps = 50'000'000;

  static IntegratorConfig fixed(double dt);
  static IntegratorConfig adaptive(double rel_tol, double abs_tol);
};

// Fills h with H(t); the matrix is pre-sized by the integrator.
using HamiltonianSource = std::function<void(double t, ComplexMatrix& h)>;

ComplexMatrix full_hamiltonian_at(const FullDrivenHamiltonian& h, double t);

// Interaction picture w.r.t. diag(0, delta, 2 delta, omega_1), counter-rotating
// terms dropped.
ComplexMatrix rwa_hamiltonian(const FullDrivenHamiltonian& h);

// i d/dt psi = H(t) psi from 0 to t_final. Returns raw amplitudes: the
// integrator conserves the norm only to its truncation error.
ComplexVector integrate_schrodinger(const HamiltonianSource& h, const PureState& psi0,
                                    double t_final, const IntegratorConfig& cfg);

struct AdiabaticEliminationReport {
  double infidelity = 0.0;
  double max_excited_population = 0.0;
  double tritter_time = 0.0;
  double leakage_scale = 0.0;  // (Omega / 2 Delta)^2
};

// Exact propagation of |1> under the time-independent RWA Hamiltonian for
// the tritter time, compared with the effective three-level evolution.
AdiabaticEliminationReport adiabatic_elimination_error(const PhysicalParams& p,
                                                       int samples = 2000);

struct RwaReport {
  double infidelity = 0.0;
  double transition_freq = 0.0;
  double t_final = 0.0;
  std::size_t steps = 0;
};

// Frame in which the full time-dependent equation is stepped. Both carry the
// counter-rotating terms; the interaction frame removes the optical phase
// e^{-i omega_1 t} exactly, so the stepper only has to follow the drive
// oscillation and the truncation error stays far below the RWA error.
enum class IntegrationFrame { schrodinger, interaction };

// e^{i H0 t} (H(t) - H0) e^{-i H0 t}, H0 = diag(0, delta, 2 delta, omega_1).
ComplexMatrix interaction_hamiltonian_at(const FullDrivenHamiltonian& h, double t);

// Fastest frequency the stepper has to resolve in the given frame.
double fastest_frequency(const FullDrivenHamiltonian& h, IntegrationFrame frame);

// Integrates the full time-dependent Hamiltonian from |1> for t_final,
// expresses the result in the interaction picture and compares it with the
// evolution under the time-independent RWA Hamiltonian.
RwaReport rwa_error_scaled(const FullDrivenHamiltonian& h, double t_final,
                           const IntegratorConfig& cfg,
                           IntegrationFrame frame = IntegrationFrame::interaction);

// RK4 step count per period of the fastest frequency used by default.
inline constexpr int kDefaultStepsPerPeriod = 64;

IntegratorConfig default_integrator(const FullDrivenHamiltonian& h,
                                    IntegrationFrame frame = IntegrationFrame::interaction);

}  // namespace atomslit
