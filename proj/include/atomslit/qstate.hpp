// Finite-dimensional quantum states, unitaries and Kraus channels.
//
// Everything here is a value type. Density matrices are allowed to carry
// trace below one: a blocker that removes atoms leaves an unnormalised state
// and the missing weight is the removed population. Nothing in this library
// renormalises behind the caller's back.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace atomslit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace tol {
// Single construction step (Hermiticity, unitarity, normalisation).
inline constexpr double kConstruction = 1e-12;
// Quantities that went through eigen-solvers or several products.
inline constexpr double kAccumulated = 1e-10;
}  // namespace tol

class QStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public QStateError {
 public:
  using QStateError::QStateError;
};

class PureState {
 public:
  explicit PureState(ComplexVector amplitudes);

  // |index> in dimension dim, index is zero-based.
  static PureState basis(int dim, int index);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_(i); }
  double norm() const { return amplitudes_.norm(); }

 private:
  ComplexVector amplitudes_;
};

// Hermitian, positive semidefinite, 0 <= trace <= 1.
class DensityMatrix {
 public:
  // Validates the invariants and stores the exact Hermitian part.
  explicit DensityMatrix(const ComplexMatrix& m);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix basis(int dim, int index);
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }
  double trace() const { return m_.trace().real(); }

 private:
  ComplexMatrix m_;
};

// Kraus representation K_i, rho -> sum_i K_i rho K_i^dagger.
class QuantumChannel {
 public:
  QuantumChannel(std::vector<ComplexMatrix> kraus, bool trace_preserving);

  static QuantumChannel identity(int dim);
  // Removes every off-diagonal element in the computational basis.
  static QuantumChannel full_dephasing(int dim);

  int dim() const { return dim_; }
  bool trace_preserving() const { return trace_preserving_; }
  const std::vector<ComplexMatrix>& kraus_operators() const { return kraus_; }

  // Kraus operators of this channel applied after `first`.
  QuantumChannel after(const QuantumChannel& first) const;

 private:
  std::vector<ComplexMatrix> kraus_;
  bool trace_preserving_;
  int dim_;
};

bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kConstruction);
bool is_unitary(const ComplexMatrix& u, double tolerance = tol::kConstruction);

// min over global phase theta of max_ij |a_ij - e^{i theta} b_ij|, with theta
// taken from the phase of <b, a> (the Frobenius optimum).
double phase_quotient_distance(const ComplexMatrix& a, const ComplexMatrix& b);

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u);
DensityMatrix apply_channel(const DensityMatrix& rho, const QuantumChannel& ch);

// <m|rho|m>; tiny negative values from rounding are clamped to zero and
// counted, see probability_clamp_count().
double project_probability(const DensityMatrix& rho, const PureState& m);

// exp(-i h t) for Hermitian h, via eigendecomposition.
ComplexMatrix matrix_exponential(const ComplexMatrix& h, double t);

std::uint64_t probability_clamp_count();

}  // namespace atomslit
