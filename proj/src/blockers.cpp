#include "atomslit/blockers.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace atomslit {

namespace {

ComplexMatrix projector(int level) {
  ComplexMatrix p = ComplexMatrix::Zero(3, 3);
  p(level - 1, level - 1) = 1.0;
  return p;
}

ComplexMatrix unblocked_projector(LevelSet blocked) {
  ComplexMatrix q = ComplexMatrix::Zero(3, 3);
  for (int j = 1; j <= 3; ++j) {
    if (!blocked.contains(j)) q(j - 1, j - 1) = 1.0;
  }
  return q;
}

}  // namespace

LevelSet::LevelSet(std::initializer_list<int> levels) {
  for (int level : levels) {
    if (level < 1 || level > 3) throw std::invalid_argument("LevelSet: level must be 1, 2 or 3");
    mask_ |= 1u << (level - 1);
  }
}

LevelSet LevelSet::parse(std::string_view label) {
  if (label == "0") return none();
  if (label.empty()) throw std::invalid_argument("LevelSet: empty label");
  unsigned mask = 0;
  for (char c : label) {
    if (c < '1' || c > '3') {
      throw std::invalid_argument("LevelSet: bad label '" + std::string(label) + "'");
    }
    const unsigned bit = 1u << (c - '1');
    if (mask & bit) {
      throw std::invalid_argument("LevelSet: repeated level in '" + std::string(label) + "'");
    }
    mask |= bit;
  }
  return from_mask(mask);
}

std::string LevelSet::label() const {
  if (empty()) return "0";
  std::string s;
  for (int j = 1; j <= 3; ++j) {
    if (contains(j)) s.push_back(static_cast<char>('0' + j));
  }
  return s;
}

std::string_view to_string(BlockMethod m) {
  switch (m) {
    case BlockMethod::erase:
      return "erase";
    case BlockMethod::dephase:
      return "dephase";
    case BlockMethod::spontaneous:
      return "spontaneous";
  }
  return "unknown";
}

BlockMethod parse_block_method(std::string_view name) {
  if (name == "erase") return BlockMethod::erase;
  if (name == "dephase") return BlockMethod::dephase;
  if (name == "spontaneous") return BlockMethod::spontaneous;
  throw std::invalid_argument("unknown blocking method '" + std::string(name) + "'");
}

void BlockerSpec::validate() const {
  if (cycles < 1) throw std::invalid_argument("BlockerSpec: cycles must be >= 1");
  if (cycles > 1 && method != BlockMethod::spontaneous) {
    throw std::invalid_argument("BlockerSpec: repeated cycles need the spontaneous method");
  }
  if (!std::isfinite(coherence_bias_rad)) {
    throw std::invalid_argument("BlockerSpec: coherence bias must be finite");
  }
}

QuantumChannel erase_channel(LevelSet blocked) {
  return QuantumChannel({unblocked_projector(blocked)}, blocked.empty());
}

QuantumChannel dephase_channel(LevelSet blocked) {
  // Sequential single-level dephasings D_j; they commute and are idempotent.
  QuantumChannel ch = QuantumChannel::identity(3);
  for (int j = 1; j <= 3; ++j) {
    if (!blocked.contains(j)) continue;
    const ComplexMatrix p = projector(j);
    const QuantumChannel dj({p, ComplexMatrix::Identity(3, 3) - p}, true);
    ch = dj.after(ch);
  }
  return ch;
}

QuantumChannel spontaneous_channel(LevelSet blocked, const BranchingMatrix& r) {
  r.validate();
  std::vector<ComplexMatrix> kraus{unblocked_projector(blocked)};
  for (int j = 1; j <= 3; ++j) {
    if (!blocked.contains(j)) continue;
    for (int m = 1; m <= 3; ++m) {
      const double rate = r(j - 1, m - 1);
      if (rate == 0.0) continue;
      ComplexMatrix k = ComplexMatrix::Zero(3, 3);
      k(m - 1, j - 1) = std::sqrt(rate);
      kraus.push_back(std::move(k));
    }
  }
  return QuantumChannel(std::move(kraus), true);
}

DensityMatrix erase_block(const DensityMatrix& rho, LevelSet blocked) {
  return apply_channel(rho, erase_channel(blocked));
}

DensityMatrix dephase_block(const DensityMatrix& rho, LevelSet blocked) {
  return apply_channel(rho, dephase_channel(blocked));
}

DensityMatrix spontaneous_block(const DensityMatrix& rho, LevelSet blocked,
                                const BranchingMatrix& r) {
  return apply_channel(rho, spontaneous_channel(blocked, r));
}

DensityMatrix repeated_spontaneous_block(const DensityMatrix& rho, LevelSet blocked,
                                         const BranchingMatrix& r, int cycles) {
  if (cycles < 1) throw std::invalid_argument("repeated_spontaneous_block: cycles must be >= 1");
  const QuantumChannel cycle = spontaneous_channel(blocked, r);
  DensityMatrix out = rho;
  for (int n = 0; n < cycles; ++n) out = apply_channel(out, cycle);
  return out;
}

DensityMatrix apply_coherence_bias(const DensityMatrix& rho, int k, int l, double phi) {
  if (k == l) throw std::invalid_argument("apply_coherence_bias: k and l must differ");
  if (k < 1 || l < 1 || k > rho.dim() || l > rho.dim()) {
    throw std::invalid_argument("apply_coherence_bias: level out of range");
  }
  if (phi == 0.0) return rho;
  ComplexMatrix m = rho.matrix();
  const Complex rotation = std::polar(1.0, phi);
  m(k - 1, l - 1) *= rotation;
  m(l - 1, k - 1) *= std::conj(rotation);
  return DensityMatrix(m);
}

DensityMatrix apply_blocker(const DensityMatrix& rho, const BlockerSpec& spec,
                            const BranchingMatrix& r) {
  spec.validate();
  DensityMatrix out = [&] {
    switch (spec.method) {
      case BlockMethod::erase:
        return erase_block(rho, spec.blocked);
      case BlockMethod::dephase:
        return dephase_block(rho, spec.blocked);
      case BlockMethod::spontaneous:
        return repeated_spontaneous_block(rho, spec.blocked, r, spec.cycles);
    }
    throw std::logic_error("apply_blocker: unhandled method");
  }();
  if (spec.blocked.size() == 1 && spec.coherence_bias_rad != 0.0) {
    const LevelSet open = spec.blocked.complement();
    int pair[2];
    int n = 0;
    for (int j = 1; j <= 3; ++j) {
      if (open.contains(j)) pair[n++] = j;
    }
    out = apply_coherence_bias(out, pair[0], pair[1], spec.coherence_bias_rad);
  }
  return out;
}

double ac_stark_shift(const PhysicalParams& p) {
  if (!(p.zeeman_excited > 0.0)) throw InvalidParams("ac_stark_shift: delta' must be positive");
  if (!(p.rabi > 0.0)) throw InvalidParams("ac_stark_shift: rabi frequency must be positive");
  return p.rabi * p.rabi / (8.0 * p.zeeman_excited);
}

double ac_stark_phase(const PhysicalParams& p) {
  return ac_stark_shift(p) * std::numbers::pi / p.rabi;
}

}  // namespace atomslit
