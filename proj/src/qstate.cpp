#include "atomslit/qstate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace atomslit {

namespace {

std::atomic<std::uint64_t> g_clamp_count{0};

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows()
       << "x" << m.cols();
    throw DimensionMismatch(os.str());
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension " << a << " vs " << b;
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw QStateError("PureState: empty amplitude vector");
  if (!all_finite(amplitudes_)) throw QStateError("PureState: non-finite amplitude");
  if (amplitudes_.norm() > 1.0 + tol::kConstruction) {
    throw QStateError("PureState: norm exceeds one");
  }
}

PureState PureState::basis(int dim, int index) {
  if (dim <= 0 || index < 0 || index >= dim) {
    throw QStateError("PureState::basis: index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
  require_square(m, "DensityMatrix");
  if (!all_finite(m)) throw QStateError("DensityMatrix: non-finite entry");
  const double asym = max_abs(m - m.adjoint());
  if (asym > tol::kConstruction) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian (max |rho - rho^dagger| = " << asym << ")";
    throw QStateError(os.str());
  }
  m_ = (m + m.adjoint()) * 0.5;
  const double tr = m_.trace().real();
  if (tr < -tol::kConstruction || tr > 1.0 + tol::kConstruction) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " outside [0, 1]";
    throw QStateError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol::kAccumulated) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << es.eigenvalues().minCoeff();
    throw QStateError(os.str());
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::basis(int dim, int index) {
  return from_pure(PureState::basis(dim, index));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim <= 0) throw QStateError("DensityMatrix::maximally_mixed: dim must be positive");
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::zero(int dim) {
  if (dim <= 0) throw QStateError("DensityMatrix::zero: dim must be positive");
  return DensityMatrix(ComplexMatrix::Zero(dim, dim));
}

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus, bool trace_preserving)
    : kraus_(std::move(kraus)), trace_preserving_(trace_preserving), dim_(0) {
  if (kraus_.empty()) throw QStateError("QuantumChannel: no Kraus operators");
  for (const auto& k : kraus_) require_square(k, "QuantumChannel");
  dim_ = static_cast<int>(kraus_.front().rows());
  ComplexMatrix sum = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& k : kraus_) {
    require_same_dim(k.rows(), dim_, "QuantumChannel Kraus operator");
    if (!all_finite(k)) throw QStateError("QuantumChannel: non-finite Kraus entry");
    sum += k.adjoint() * k;
  }
  const ComplexMatrix id = ComplexMatrix::Identity(dim_, dim_);
  if (trace_preserving_) {
    if (max_abs(sum - id) > tol::kConstruction) {
      throw QStateError("QuantumChannel: sum K^dagger K differs from identity");
    }
  } else {
    ComplexMatrix slack = id - sum;
    slack = (slack + slack.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(slack, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::kAccumulated) {
      throw QStateError("QuantumChannel: sum K^dagger K exceeds identity");
    }
  }
}

QuantumChannel QuantumChannel::identity(int dim) {
  return QuantumChannel({ComplexMatrix::Identity(dim, dim)}, true);
}

QuantumChannel QuantumChannel::full_dephasing(int dim) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(dim);
  for (int j = 0; j < dim; ++j) {
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    p(j, j) = 1.0;
    kraus.push_back(std::move(p));
  }
  return QuantumChannel(std::move(kraus), true);
}

QuantumChannel QuantumChannel::after(const QuantumChannel& first) const {
  require_same_dim(dim_, first.dim_, "QuantumChannel::after");
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(kraus_.size() * first.kraus_.size());
  for (const auto& a : kraus_) {
    for (const auto& b : first.kraus_) {
      ComplexMatrix ab = a * b;
      if (max_abs(ab) == 0.0) continue;
      kraus.push_back(std::move(ab));
    }
  }
  if (kraus.empty()) kraus.push_back(ComplexMatrix::Zero(dim_, dim_));
  return QuantumChannel(std::move(kraus), trace_preserving_ && first.trace_preserving_);
}

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tolerance * std::max(1.0, max_abs(m));
}

bool is_unitary(const ComplexMatrix& u, double tolerance) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())) <= tolerance;
}

double phase_quotient_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.rows(), b.rows(), "phase_quotient_distance");
  require_same_dim(a.cols(), b.cols(), "phase_quotient_distance");
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  return max_abs(a - phase * b);
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u) {
  require_square(u, "apply_unitary");
  require_same_dim(rho.dim(), u.rows(), "apply_unitary");
  if (!is_unitary(u)) throw QStateError("apply_unitary: operator is not unitary");
  const ComplexMatrix out = u * rho.matrix() * u.adjoint();
  return DensityMatrix((out + out.adjoint()) * 0.5);
}

DensityMatrix apply_channel(const DensityMatrix& rho, const QuantumChannel& ch) {
  require_same_dim(rho.dim(), ch.dim(), "apply_channel");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : ch.kraus_operators()) out += k * rho.matrix() * k.adjoint();
  return DensityMatrix((out + out.adjoint()) * 0.5);
}

double project_probability(const DensityMatrix& rho, const PureState& m) {
  require_same_dim(rho.dim(), m.dim(), "project_probability");
  if (std::abs(m.norm() - 1.0) > tol::kConstruction) {
    throw QStateError("project_probability: measurement vector is not normalised");
  }
  const Complex p = m.amplitudes().dot(rho.matrix() * m.amplitudes());
  if (std::abs(p.imag()) > tol::kConstruction) {
    throw QStateError("project_probability: expectation value is not real");
  }
  double value = p.real();
  if (value < -tol::kAccumulated || value > 1.0 + tol::kAccumulated) {
    std::ostringstream os;
    os << "project_probability: value " << value << " outside [0, 1]";
    throw QStateError(os.str());
  }
  if (value < 0.0) {
    g_clamp_count.fetch_add(1, std::memory_order_relaxed);
    value = 0.0;
  } else if (value > 1.0) {
    g_clamp_count.fetch_add(1, std::memory_order_relaxed);
    value = 1.0;
  }
  return value;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& h, double t) {
  require_square(h, "matrix_exponential");
  if (!all_finite(h)) throw QStateError("matrix_exponential: non-finite entry");
  if (!is_hermitian(h)) throw QStateError("matrix_exponential: operator is not Hermitian");
  const ComplexMatrix herm = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
  const Eigen::VectorXd& w = es.eigenvalues();
  ComplexVector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, -w(i) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

std::uint64_t probability_clamp_count() {
  return g_clamp_count.load(std::memory_order_relaxed);
}

}  // namespace atomslit
