// The 87Sr tripod: three ground Zeeman sublevels |1>,|2>,|3> driven through a
// common far-detuned excited level. All frequencies are angular (rad/s),
// hbar = 1, levels are 1-based in names and docs and 0-based in indices.

#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "atomslit/qstate.hpp"

namespace atomslit {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Bohr magneton over hbar, rad/(s T).
inline constexpr double kBohrMagnetonOverHbar = kTwoPi * 13.996e9;

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// r[k][j]: probability that excited state e_k decays to ground state j.
struct BranchingMatrix {
  std::array<std::array<double, 3>, 3> r{};

  double operator()(int excited, int ground) const { return r[excited][ground]; }

  // Squared Clebsch-Gordan coefficients for the m_F = 5/2, 7/2, 9/2 tripod.
  static BranchingMatrix strontium87();
  void validate() const;
};

struct PhysicalParams {
  double rabi = 0.0;            // Omega
  double detuning = 0.0;        // Delta
  double zeeman_ground = 0.0;   // delta
  double zeeman_excited = 0.0;  // delta'
  double linewidth = 0.0;       // Gamma
  BranchingMatrix branching = BranchingMatrix::strontium87();
  std::optional<double> b_field;  // tesla
  double lande_ground = 0.0;
  double lande_excited = 0.0;

  void validate() const;
};

PhysicalParams default_params();

// |g| mu_B B / hbar.
double zeeman_splitting(double b_field, double lande);

// -(Omega^2 / 4 Delta) times the all-ones matrix (interaction picture).
ComplexMatrix effective_hamiltonian(const PhysicalParams& p);

// |phi_k> = 3^{-1/2} sum_j eta^{k j} |j>, eta = e^{2 pi i / 3}; element k-1
// holds |phi_k>.
std::array<PureState, 3> fourier_basis();

// Shortest drive time taking |1> to an even superposition, 8 pi Delta / 9 Omega^2.
double tritter_time(const PhysicalParams& p);

// Closed-form Schroedinger-picture tritter for a given Zeeman phase delta*tau.
ComplexMatrix tritter_unitary(double zeeman_phase);
ComplexMatrix tritter_unitary(const PhysicalParams& p);

// The same operator assembled from exponentials,
// e^{+i H0g tau} exp(-i Heff tau) e^{-i H0g tau}; equals the closed form times
// e^{i pi/6}. Kept only as a cross-check.
ComplexMatrix tritter_unitary_from_exponentials(const PhysicalParams& p);

// diag(1, e^{-i phase}, e^{-2 i phase}) with phase = delta * T.
ComplexMatrix free_evolution_phase(double zeeman_phase);
ComplexMatrix free_evolution(const PhysicalParams& p, double duration);

// The ground-manifold base Hamiltonian diag(0, delta, 2 delta).
ComplexMatrix ground_hamiltonian(const PhysicalParams& p);

}  // namespace atomslit
