#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "atomslit/blockers.hpp"
#include "support.hpp"

using namespace atomslit;
using testing::max_abs;

namespace {

DensityMatrix even_superposition() {
  return DensityMatrix::from_pure(PureState(tritter_unitary(0.0).col(0)));
}

using BlockFn = std::function<DensityMatrix(const DensityMatrix&, LevelSet)>;

// sum over blocked sets S of (-1)^{|S|} M_S(rho)
ComplexMatrix inclusion_exclusion(const DensityMatrix& rho, const BlockFn& block) {
  ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
  for (unsigned mask = 0; mask < 8; ++mask) {
    const LevelSet blocked = LevelSet::from_mask(mask);
    const double sign = blocked.size() % 2 == 0 ? 1.0 : -1.0;
    sum += sign * block(rho, blocked).matrix();
  }
  return sum;
}

}  // namespace

TEST_SUITE("blockers") {

TEST_CASE("level sets") {
  CHECK(LevelSet::parse("123") == LevelSet::all());
  CHECK(LevelSet::parse("0") == LevelSet::none());
  CHECK(LevelSet::parse("13").complement() == LevelSet{2});
  CHECK(LevelSet{3, 1}.label() == "13");
  CHECK(LevelSet::none().label() == "0");
  CHECK_THROWS(LevelSet::parse("14"));
  CHECK_THROWS(LevelSet::parse("11"));
  CHECK_THROWS(LevelSet::parse(""));
}

TEST_CASE("blocker spec validation") {
  BlockerSpec s;
  s.cycles = 0;
  CHECK_THROWS(s.validate());
  s.cycles = 2;
  CHECK_THROWS(s.validate());
  s.method = BlockMethod::spontaneous;
  CHECK_NOTHROW(s.validate());
  CHECK(parse_block_method("dephase") == BlockMethod::dephase);
  CHECK_THROWS(parse_block_method("absorb"));
}

TEST_CASE("erase examples") {
  ComplexVector v(3);
  v << 0.6, Complex(0.0, 0.48), 0.64;
  const DensityMatrix rho = DensityMatrix::from_pure(PureState(v));
  const DensityMatrix out = erase_block(rho, {1});
  ComplexVector w = v;
  w(0) = 0.0;
  CHECK(max_abs(out.matrix() - w * w.adjoint()) < 1e-15);
  CHECK(out.trace() == doctest::Approx(1.0 - 0.36));

  CHECK(max_abs(erase_block(rho, LevelSet::none()).matrix() - rho.matrix()) == 0.0);
  const DensityMatrix gone = erase_block(even_superposition(), LevelSet::all());
  CHECK(max_abs(gone.matrix()) == 0.0);
  CHECK(gone.trace() == 0.0);
}

TEST_CASE("dephase examples") {
  const DensityMatrix out = dephase_block(even_superposition(), {1});
  CHECK(std::abs(out(0, 0).real() - 1.0 / 3.0) < 1e-15);
  CHECK(out(1, 2) == even_superposition()(1, 2));
  CHECK(out(0, 1) == 0.0);
  CHECK(out(0, 2) == 0.0);

  const DensityMatrix mixed = DensityMatrix::maximally_mixed(3);
  for (unsigned mask = 0; mask < 8; ++mask) {
    CHECK(max_abs(dephase_block(mixed, LevelSet::from_mask(mask)).matrix() - mixed.matrix()) == 0.0);
  }
  const DensityMatrix rho = testing::random_density(3);
  const ComplexMatrix diag = rho.matrix().diagonal().asDiagonal();
  CHECK(max_abs(dephase_block(rho, LevelSet::all()).matrix() - diag) < 1e-15);
}

TEST_CASE("spontaneous examples") {
  const BranchingMatrix r = BranchingMatrix::strontium87();
  const DensityMatrix out = spontaneous_block(DensityMatrix::basis(3, 1), {2}, r);
  CHECK(std::abs(out(0, 0).real() - 32.0 / 99) < 1e-15);
  CHECK(std::abs(out(1, 1).real() - 49.0 / 99) < 1e-15);
  CHECK(std::abs(out(2, 2).real() - 18.0 / 99) < 1e-15);
  CHECK(max_abs(out.matrix() - ComplexMatrix(out.matrix().diagonal().asDiagonal())) == 0.0);

  // Same result through the generic channel machinery.
  const DensityMatrix via_channel = apply_channel(DensityMatrix::basis(3, 1), spontaneous_channel({2}, r));
  CHECK(max_abs(via_channel.matrix() - out.matrix()) < 1e-15);

  const DensityMatrix even = even_superposition();
  const DensityMatrix b2 = spontaneous_block(even, {2}, r);
  CHECK(b2(0, 2) == even(0, 2));
  CHECK(b2(0, 1) == 0.0);
  CHECK(b2(1, 2) == 0.0);
  CHECK(std::abs(b2(0, 0).real() - (1.0 / 3 + r(1, 0) / 3)) < 1e-15);
  CHECK(std::abs(b2(1, 1).real() - r(1, 1) / 3) < 1e-15);
  CHECK(std::abs(b2(2, 2).real() - (1.0 / 3 + r(1, 2) / 3)) < 1e-15);

  const DensityMatrix diag = dephase_block(testing::random_density(3), LevelSet::all());
  const DensityMatrix full = spontaneous_block(diag, LevelSet::all(), r);
  for (int m = 0; m < 3; ++m) {
    double expected = 0.0;
    for (int j = 0; j < 3; ++j) expected += diag(j, j).real() * r(j, m);
    CHECK(std::abs(full(m, m).real() - expected) < 1e-15);
  }
}

TEST_CASE("repeated spontaneous blocking") {
  const BranchingMatrix r = BranchingMatrix::strontium87();
  const DensityMatrix rho = testing::random_density(3);
  for (unsigned mask = 0; mask < 8; ++mask) {
    const LevelSet s = LevelSet::from_mask(mask);
    CHECK(max_abs(repeated_spontaneous_block(rho, s, r, 1).matrix() -
                  spontaneous_block(rho, s, r).matrix()) == 0.0);
  }
  const DensityMatrix two = repeated_spontaneous_block(even_superposition(), {2}, r, 2);
  CHECK(std::abs(two(1, 1).real() - r(1, 1) * r(1, 1) / 3.0) < 1e-15);
  CHECK_THROWS(repeated_spontaneous_block(rho, {1}, r, 0));
}

TEST_CASE("property: inclusion-exclusion identities vanish") {
  const BranchingMatrix paper = BranchingMatrix::strontium87();
  for (int trial = 0; trial < 1000; ++trial) {
    const DensityMatrix rho = testing::random_density(3, 0.3);
    const BranchingMatrix r = testing::random_branching();
    CHECK(max_abs(inclusion_exclusion(rho, erase_block)) < 1e-12);
    CHECK(max_abs(inclusion_exclusion(rho, dephase_block)) < 1e-12);
    CHECK(max_abs(inclusion_exclusion(rho, [&](const DensityMatrix& x, LevelSet s) {
            return spontaneous_block(x, s, r);
          })) < 1e-12);
    CHECK(max_abs(inclusion_exclusion(rho, [&](const DensityMatrix& x, LevelSet s) {
            return repeated_spontaneous_block(x, s, paper, 2);
          })) < 1e-12);
  }
}

TEST_CASE("inclusion-exclusion fails after three spontaneous cycles") {
  const BranchingMatrix r = BranchingMatrix::strontium87();
  const ComplexMatrix dev =
      inclusion_exclusion(even_superposition(), [&](const DensityMatrix& x, LevelSet s) {
        return repeated_spontaneous_block(x, s, r, 3);
      });
  CHECK(dev.norm() > 1e-6);
}

TEST_CASE("property: blockers are channels and keep the open coherence") {
  const BranchingMatrix r = BranchingMatrix::strontium87();
  for (int trial = 0; trial < 500; ++trial) {
    const DensityMatrix rho = testing::random_density(3, 0.3);
    const LevelSet blocked = LevelSet::from_mask(static_cast<unsigned>(trial % 8));
    const DensityMatrix d = dephase_block(rho, blocked);
    const DensityMatrix b = spontaneous_block(rho, blocked, r);
    const DensityMatrix e = erase_block(rho, blocked);
    CHECK(std::abs(d.trace() - rho.trace()) < 1e-12);
    CHECK(std::abs(b.trace() - rho.trace()) < 1e-12);
    CHECK(e.trace() <= rho.trace() + 1e-12);
    CHECK(dephase_channel(blocked).trace_preserving());
    CHECK(spontaneous_channel(blocked, r).trace_preserving());
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) {
        if (k == l || blocked.contains(k + 1) || blocked.contains(l + 1)) continue;
        CHECK(d(k, l) == rho(k, l));
        CHECK(b(k, l) == rho(k, l));
      }
    }
  }
}

TEST_CASE("blockers agree with the independent oracle") {
  const oracle::R3 r = oracle::strontium_ratios();
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix rho = testing::random_density(3, 0.5);
    oracle::M3 m{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = rho(i, j);
    for (unsigned mask = 0; mask < 8; ++mask) {
      const LevelSet s = LevelSet::from_mask(mask);
      CHECK(max_abs(erase_block(rho, s).matrix() -
                    testing::to_eigen(oracle::block_once(m, mask, oracle::Method::erase, r))) < 1e-15);
      CHECK(max_abs(dephase_block(rho, s).matrix() -
                    testing::to_eigen(oracle::block_once(m, mask, oracle::Method::dephase, r))) < 1e-15);
      CHECK(max_abs(spontaneous_block(rho, s, BranchingMatrix::strontium87()).matrix() -
                    testing::to_eigen(oracle::block_once(m, mask, oracle::Method::spontaneous, r))) <
            1e-15);
    }
  }
}

TEST_CASE("coherence bias") {
  const DensityMatrix rho = testing::random_density(3);
  CHECK(max_abs(apply_coherence_bias(rho, 2, 3, 0.0).matrix() - rho.matrix()) == 0.0);
  CHECK(max_abs(apply_coherence_bias(rho, 2, 3, 2.0 * std::numbers::pi).matrix() - rho.matrix()) < 1e-12);

  const DensityMatrix blocked = erase_block(even_superposition(), {1});
  const DensityMatrix biased = apply_coherence_bias(blocked, 2, 3, 5e-3);
  CHECK(std::abs(std::abs(biased(1, 2)) - std::abs(blocked(1, 2))) < 1e-15);
  CHECK(std::abs(std::arg(biased(1, 2)) - std::arg(blocked(1, 2)) - 5e-3) < 1e-12);
  CHECK(std::abs(std::arg(biased(2, 1)) - std::arg(blocked(2, 1)) + 5e-3) < 1e-12);
  CHECK_THROWS(apply_coherence_bias(rho, 2, 2, 0.1));
}

TEST_CASE("bias only enters single-blocked runs") {
  const BranchingMatrix r = BranchingMatrix::strontium87();
  const DensityMatrix rho = even_superposition();
  for (unsigned mask = 0; mask < 8; ++mask) {
    BlockerSpec biased{BlockMethod::dephase, LevelSet::from_mask(mask), 1, 0.01};
    BlockerSpec plain{BlockMethod::dephase, LevelSet::from_mask(mask), 1, 0.0};
    const double diff =
        max_abs(apply_blocker(rho, biased, r).matrix() - apply_blocker(rho, plain, r).matrix());
    if (LevelSet::from_mask(mask).size() == 1) {
      CHECK(diff > 1e-4);
    } else {
      CHECK(diff == 0.0);
    }
  }
}

TEST_CASE("ac-stark shift") {
  const PhysicalParams p = default_params();
  CHECK(ac_stark_shift(p) == doctest::Approx(kTwoPi * 147.06).epsilon(1e-3));
  CHECK(ac_stark_phase(p) == doctest::Approx(4.62e-3).epsilon(1e-3));
  PhysicalParams weak = p;
  weak.rabi = 1e-9;
  CHECK(ac_stark_phase(weak) < 1e-15);
}

}  // TEST_SUITE
