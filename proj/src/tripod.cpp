#include "atomslit/tripod.hpp"

#include <cmath>
#include <sstream>

namespace atomslit {

namespace {

const Complex kEta = std::polar(1.0, kTwoPi / 3.0);

}  // namespace

BranchingMatrix BranchingMatrix::strontium87() {
  BranchingMatrix b;
  b.r = {{{1.0 / 45.0, 8.0 / 45.0, 36.0 / 45.0},
          {32.0 / 99.0, 49.0 / 99.0, 18.0 / 99.0},
          {36.0 / 55.0, 18.0 / 55.0, 1.0 / 55.0}}};
  return b;
}

void BranchingMatrix::validate() const {
  for (int k = 0; k < 3; ++k) {
    double row = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double v = r[k][j];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidParams("branching ratio outside [0, 1]");
      }
      row += v;
    }
    if (std::abs(row - 1.0) > tol::kConstruction) {
      std::ostringstream os;
      os << "branching row " << k + 1 << " sums to " << row;
      throw InvalidParams(os.str());
    }
  }
}

void PhysicalParams::validate() const {
  if (!(rabi > 0.0)) throw InvalidParams("rabi frequency must be positive");
  if (!(detuning != 0.0) || !std::isfinite(detuning)) {
    throw InvalidParams("detuning must be finite and non-zero");
  }
  if (!(zeeman_ground > 0.0)) throw InvalidParams("ground Zeeman splitting must be positive");
  if (!(linewidth >= 0.0)) throw InvalidParams("linewidth must be non-negative");
  if (!(std::abs(detuning) > linewidth)) {
    throw InvalidParams("|detuning| must exceed the excited-state linewidth");
  }
  if (zeeman_excited < 0.0) throw InvalidParams("excited Zeeman splitting must be non-negative");
  branching.validate();
}

PhysicalParams default_params() {
  PhysicalParams p;
  p.rabi = kTwoPi * 0.1e6;
  p.detuning = kTwoPi * 1.0e6;
  p.zeeman_ground = kTwoPi * 18.2e3;
  p.zeeman_excited = kTwoPi * 8.5e6;
  p.linewidth = kTwoPi * 7.5e3;
  p.branching = BranchingMatrix::strontium87();
  p.b_field = 1e-2;
  p.lande_ground = -1.3e-4;
  p.lande_excited = 2.0 / 33.0;
  return p;
}

double zeeman_splitting(double b_field, double lande) {
  if (b_field < 0.0) throw InvalidParams("magnetic field must be non-negative");
  return std::abs(lande) * kBohrMagnetonOverHbar * b_field;
}

ComplexMatrix effective_hamiltonian(const PhysicalParams& p) {
  p.validate();
  const double coupling = p.rabi * p.rabi / (4.0 * p.detuning);
  return ComplexMatrix::Constant(3, 3, Complex(-coupling, 0.0));
}

std::array<PureState, 3> fourier_basis() {
  const double norm = 1.0 / std::sqrt(3.0);
  auto make = [&](int k) {
    ComplexVector v(3);
    for (int j = 1; j <= 3; ++j) v(j - 1) = norm * std::polar(1.0, kTwoPi * k * j / 3.0);
    return PureState(std::move(v));
  };
  return {make(1), make(2), make(3)};
}

double tritter_time(const PhysicalParams& p) {
  p.validate();
  return 8.0 * std::numbers::pi * p.detuning / (9.0 * p.rabi * p.rabi);
}

ComplexMatrix tritter_unitary(double zeeman_phase) {
  // Entry (j, k) = eta^{[j != k]} e^{i (j - k) delta tau} / sqrt(3).
  ComplexMatrix u(3, 3);
  const double norm = 1.0 / std::sqrt(3.0);
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const Complex phase = std::polar(1.0, (j - k) * zeeman_phase);
      u(j, k) = norm * (j == k ? Complex(1.0) : kEta * phase);
    }
  }
  return u;
}

ComplexMatrix tritter_unitary(const PhysicalParams& p) {
  return tritter_unitary(p.zeeman_ground * tritter_time(p));
}

ComplexMatrix tritter_unitary_from_exponentials(const PhysicalParams& p) {
  const double tau = tritter_time(p);
  const ComplexMatrix h0 = ground_hamiltonian(p);
  return matrix_exponential(h0, -tau) * matrix_exponential(effective_hamiltonian(p), tau) *
         matrix_exponential(h0, tau);
}

ComplexMatrix free_evolution_phase(double zeeman_phase) {
  ComplexMatrix u = ComplexMatrix::Zero(3, 3);
  for (int j = 0; j < 3; ++j) u(j, j) = std::polar(1.0, -j * zeeman_phase);
  return u;
}

ComplexMatrix free_evolution(const PhysicalParams& p, double duration) {
  if (duration < 0.0) throw InvalidParams("free evolution time must be non-negative");
  return free_evolution_phase(p.zeeman_ground * duration);
}

ComplexMatrix ground_hamiltonian(const PhysicalParams& p) {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(1, 1) = p.zeeman_ground;
  h(2, 2) = 2.0 * p.zeeman_ground;
  return h;
}

}  // namespace atomslit
