// Random states, unitaries and channels for property tests.

#pragma once

#include <complex>
#include <random>

#include "atomslit/blockers.hpp"
#include "atomslit/qstate.hpp"
#include "oracle.hpp"

namespace testing {

using atomslit::Complex;
using atomslit::ComplexMatrix;
using atomslit::ComplexVector;
using atomslit::DensityMatrix;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20261019);
  return engine;
}

inline double uniform(double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Complex gaussian_c() {
  std::normal_distribution<double> n;
  return {n(rng()), n(rng())};
}

inline ComplexMatrix random_matrix(int dim) {
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = gaussian_c();
  return m;
}

inline ComplexMatrix random_hermitian(int dim) {
  const ComplexMatrix a = random_matrix(dim);
  return (a + a.adjoint()) / 2.0;
}

// Haar-ish unitary from the QR decomposition of a Ginibre matrix.
inline ComplexMatrix random_unitary(int dim) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(dim));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
  return q;
}

// Random mixed state with trace drawn from [lo_trace, 1].
inline DensityMatrix random_density(int dim, double lo_trace = 1.0) {
  const ComplexMatrix a = random_matrix(dim);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  rho *= uniform(lo_trace, 1.0);
  return DensityMatrix(rho);
}

inline ComplexVector random_unit_vector(int dim) {
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = gaussian_c();
  return v / v.norm();
}

inline atomslit::BranchingMatrix random_branching() {
  atomslit::BranchingMatrix b;
  for (auto& row : b.r) {
    double sum = 0.0;
    for (double& x : row) sum += (x = uniform(0.0, 1.0));
    for (double& x : row) x /= sum;
  }
  return b;
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline ComplexMatrix to_eigen(const oracle::M3& m) {
  ComplexMatrix out(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = m[i][j];
  return out;
}

}  // namespace testing
