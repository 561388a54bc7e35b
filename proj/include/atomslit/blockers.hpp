// Slit blockers for the three-level interferometer, written as quantum maps.
//
//   erase        rho -> Q rho Q, blocked population leaves the tripod
//   dephase      coherences touching a blocked level are removed
//   spontaneous  blocked population is pi-pulsed to its own excited level
//                and decays back incoherently with branching ratios r

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "atomslit/qstate.hpp"
#include "atomslit/tripod.hpp"

namespace atomslit {

// Subset of the levels {1, 2, 3}.
class LevelSet {
 public:
  constexpr LevelSet() = default;
  LevelSet(std::initializer_list<int> levels);

  static constexpr LevelSet from_mask(unsigned mask) { return LevelSet(mask & 7u); }
  static constexpr LevelSet all() { return LevelSet(7u); }
  static constexpr LevelSet none() { return LevelSet(0u); }

  // "123", "12", "3", ... and "0" for the empty set.
  static LevelSet parse(std::string_view label);

  constexpr unsigned mask() const { return mask_; }
  constexpr bool contains(int level) const { return (mask_ >> (level - 1)) & 1u; }
  constexpr LevelSet complement() const { return LevelSet(~mask_ & 7u); }
  constexpr int size() const {
    return static_cast<int>((mask_ & 1u) + ((mask_ >> 1) & 1u) + ((mask_ >> 2) & 1u));
  }
  constexpr bool empty() const { return mask_ == 0; }
  std::string label() const;

  friend constexpr bool operator==(LevelSet, LevelSet) = default;

 private:
  constexpr explicit LevelSet(unsigned mask) : mask_(mask) {}
  unsigned mask_ = 0;
};

enum class BlockMethod { erase, dephase, spontaneous };

std::string_view to_string(BlockMethod m);
BlockMethod parse_block_method(std::string_view name);

struct BlockerSpec {
  BlockMethod method = BlockMethod::erase;
  LevelSet blocked;
  int cycles = 1;
  double coherence_bias_rad = 0.0;

  void validate() const;
};

QuantumChannel erase_channel(LevelSet blocked);
QuantumChannel dephase_channel(LevelSet blocked);
QuantumChannel spontaneous_channel(LevelSet blocked, const BranchingMatrix& r);

DensityMatrix erase_block(const DensityMatrix& rho, LevelSet blocked);
DensityMatrix dephase_block(const DensityMatrix& rho, LevelSet blocked);
DensityMatrix spontaneous_block(const DensityMatrix& rho, LevelSet blocked,
                                const BranchingMatrix& r);
// n excitation-decay cycles back to back.
DensityMatrix repeated_spontaneous_block(const DensityMatrix& rho, LevelSet blocked,
                                         const BranchingMatrix& r, int cycles);

// rho_kl -> rho_kl e^{i phi}, rho_lk -> rho_lk e^{-i phi}; k and l are 1-based.
DensityMatrix apply_coherence_bias(const DensityMatrix& rho, int k, int l, double phi);

// Applies spec.method to the blocked levels, then the coherence bias when
// exactly one level is blocked (the surviving pair, lower index first).
DensityMatrix apply_blocker(const DensityMatrix& rho, const BlockerSpec& spec,
                            const BranchingMatrix& r);

// Omega^2 / 8 delta' during the resonant pi-pulse.
double ac_stark_shift(const PhysicalParams& p);
// Accumulated over the pi-pulse duration pi / Omega.
double ac_stark_phase(const PhysicalParams& p);

}  // namespace atomslit
