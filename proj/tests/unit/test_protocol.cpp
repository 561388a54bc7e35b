#include <doctest.h>

#include <cmath>
#include <numbers>

#include "atomslit/protocol.hpp"
#include "support.hpp"

using namespace atomslit;
using std::numbers::pi;

namespace {

RunConfig config_for(BlockMethod m, double delta_t) {
  RunConfig c;
  c.method = m;
  c.delta_t = delta_t;
  return c;
}

struct Fringe {
  double p123, p12, p13, p23, pj;
};

Fringe erase_formula(double x) {
  return {(3 + 4 * std::cos(x) + 2 * std::cos(2 * x)) / 9, 2 * (1 + std::cos(x)) / 9,
          2 * (1 + std::cos(2 * x)) / 9, 2 * (1 + std::cos(x)) / 9, 1.0 / 9};
}

std::vector<double> dense_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 200; ++i) g.push_back(4 * pi * i / 200.0);
  return g;
}

// (2/9)[(2 sin x + sin 2x) sin phi - (2 cos x + cos 2x)(cos phi - 1)]
double bias_formula(double x, double phi) {
  return 2.0 / 9.0 *
         ((2 * std::sin(x) + std::sin(2 * x)) * std::sin(phi) -
          (2 * std::cos(x) + std::cos(2 * x)) * (std::cos(phi) - 1));
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("probability table container") {
  ProbabilityTable t;
  CHECK_FALSE(t.has(LevelSet::all()));
  CHECK_THROWS_AS(t.at("123"), MissingEntry);
  CHECK_THROWS(t.set(LevelSet::all(), 1.5));
  t.set(LevelSet{1, 2}, 0.25);
  CHECK(t.at("12") == 0.25);
  CHECK_THROWS_AS(sorkin_s3(t), MissingEntry);
}

TEST_CASE("run_single examples") {
  CHECK(std::abs(run_single(config_for(BlockMethod::erase, 0.0), LevelSet::all()) - 1.0) < 1e-12);
  for (double x : {0.0, 0.4, 2.2, 5.0}) {
    CHECK(std::abs(run_single(config_for(BlockMethod::erase, x), {1}) - 1.0 / 9) < 1e-12);
  }
  CHECK(std::abs(run_single(config_for(BlockMethod::erase, pi / 2), {1, 3})) < 1e-12);
}

TEST_CASE("probability table examples") {
  const ProbabilityTable e = probability_table(config_for(BlockMethod::erase, 0.0));
  CHECK(std::abs(e.at("123") - 1.0) < 1e-12);
  for (const char* l : {"12", "13", "23"}) CHECK(std::abs(e.at(l) - 4.0 / 9) < 1e-12);
  for (const char* l : {"1", "2", "3"}) CHECK(std::abs(e.at(l) - 1.0 / 9) < 1e-12);
  CHECK(e.at("0") == 0.0);

  const ProbabilityTable d = probability_table(config_for(BlockMethod::dephase, 0.0));
  CHECK(std::abs(d.at("12") - 5.0 / 9) < 1e-12);
  CHECK(std::abs(d.at("1") - 3.0 / 9) < 1e-12);
  CHECK(std::abs(d.at("0") - 1.0 / 3) < 1e-12);
}

TEST_CASE("S3, S2 and kappa examples") {
  const ProbabilityTable e0 = probability_table(config_for(BlockMethod::erase, 0.0));
  CHECK(std::abs(sorkin_s3(e0)) < 1e-12);
  CHECK(std::abs(s2(e0, 1, 2) - 2.0 / 9) < 1e-12);
  CHECK(std::abs(kappa(e0)) < 1e-12);
  CHECK(std::abs(kappa_denominator(e0) - 6.0 / 9) < 1e-12);

  const ProbabilityTable e90 = probability_table(config_for(BlockMethod::erase, pi / 2));
  CHECK(std::abs(s2(e90, 1, 3) + 2.0 / 9) < 1e-12);

  CHECK(std::abs(kappa(probability_table(config_for(BlockMethod::dephase, 0.0)))) < 1e-12);

  ProbabilityTable zero;
  for (const char* l : ProbabilityTable::kLabels) zero.set(LevelSet::parse(l), 0.0);
  CHECK(sorkin_s3(zero) == 0.0);
  CHECK_THROWS_AS(kappa(zero), DegenerateOperatingPoint);

  ProbabilityTable classical = zero;
  classical.set({1}, 0.1);
  classical.set({2}, 0.2);
  classical.set({1, 2}, 0.3);
  CHECK(std::abs(s2(classical, 1, 2)) < 1e-15);
  CHECK_THROWS(s2(classical, 2, 2));
}

TEST_CASE("fringe scan reproduces the erase-method fringe formulas") {
  const auto scan = fringe_scan(config_for(BlockMethod::erase, 0.0), dense_grid());
  for (const FringePoint& pt : scan) {
    const Fringe f = erase_formula(pt.delta_t);
    CHECK(std::abs(pt.table.at("123") - f.p123) < 1e-12);
    CHECK(std::abs(pt.table.at("12") - f.p12) < 1e-12);
    CHECK(std::abs(pt.table.at("13") - f.p13) < 1e-12);
    CHECK(std::abs(pt.table.at("23") - f.p23) < 1e-12);
    for (const char* l : {"1", "2", "3"}) CHECK(std::abs(pt.table.at(l) - f.pj) < 1e-12);
    // Two-path sum rule with P_0 = 0.
    const ProbabilityTable& t = pt.table;
    CHECK(std::abs(t.at("123") - (t.at("12") + t.at("13") + t.at("23") - t.at("1") - t.at("2") -
                                  t.at("3"))) < 1e-12);
  }
  const auto nodes = fringe_scan(config_for(BlockMethod::erase, 0.0), {pi, 2 * pi / 3});
  CHECK(std::abs(nodes[0].table.at("123") - 1.0 / 9) < 1e-12);
  CHECK(std::abs(nodes[1].table.at("123")) < 1e-12);
  CHECK_THROWS(fringe_scan(config_for(BlockMethod::erase, 0.0), {}));
}

TEST_CASE("P13 runs at twice the frequency of P12") {
  for (double x : dense_grid()) {
    const double p13 = run_single(config_for(BlockMethod::erase, x), {1, 3});
    const double p12 = run_single(config_for(BlockMethod::erase, 2 * x), {1, 2});
    CHECK(std::abs(p13 - p12) < 1e-12);
  }
}

TEST_CASE("dephase and spontaneous fringes: offsets and equivalence") {
  for (double x : dense_grid()) {
    const ProbabilityTable e = probability_table(config_for(BlockMethod::erase, x));
    const ProbabilityTable d = probability_table(config_for(BlockMethod::dephase, x));
    const ProbabilityTable s = probability_table(config_for(BlockMethod::spontaneous, x));
    for (const char* l : ProbabilityTable::kLabels) CHECK(std::abs(d.at(l) - s.at(l)) < 1e-12);
    for (const char* l : {"12", "13", "23"}) CHECK(std::abs(d.at(l) - e.at(l) - 1.0 / 9) < 1e-12);
    for (const char* l : {"1", "2", "3"}) CHECK(std::abs(d.at(l) - e.at(l) - 2.0 / 9) < 1e-12);
    CHECK(std::abs(d.at("123") - e.at("123")) < 1e-12);
    CHECK(std::abs(d.at("0") - 1.0 / 3) < 1e-12);
  }
}

TEST_CASE("protocol agrees with the independent oracle") {
  for (auto [m, om] : {std::pair{BlockMethod::erase, oracle::Method::erase},
                       std::pair{BlockMethod::dephase, oracle::Method::dephase},
                       std::pair{BlockMethod::spontaneous, oracle::Method::spontaneous}}) {
    for (double x : {0.0, 0.7, pi / 3, 2.9, 7.1}) {
      for (double phi : {0.0, 0.004, -0.03}) {
        RunConfig c = config_for(m, x);
        c.bias_phi = phi;
        oracle::Setup s;
        s.method = om;
        s.delta_t = x;
        s.delta_tau = c.params.zeeman_ground * tritter_time(c.params);
        s.bias_phi = phi;
        const ProbabilityTable t = probability_table(c);
        const auto o = oracle::table(s);
        for (unsigned mask = 0; mask < 8; ++mask) {
          CHECK(std::abs(t.at(LevelSet::from_mask(mask)) - o[mask]) < 1e-13);
        }
      }
    }
  }
}

TEST_CASE("property: S3 vanishes for random states, closings and measurements") {
  for (int trial = 0; trial < 1000; ++trial) {
    RunConfig c;
    c.method = static_cast<BlockMethod>(trial % 3);
    c.delta_t = testing::uniform(0.0, 4 * pi);
    c.initial_state = testing::random_density(3);
    c.closing = testing::random_unitary(3);
    c.measurement = PureState(testing::random_unit_vector(3));
    if (c.method == BlockMethod::spontaneous) c.params.branching = testing::random_branching();
    CHECK(std::abs(sorkin_s3(probability_table(c))) < 1e-12);
  }
}

TEST_CASE("repeated spontaneous cycles") {
  RunConfig c = config_for(BlockMethod::spontaneous, pi / 3);
  c.cycles = 3;
  // The default closing reads out |1> in the Fourier basis, where every
  // level contributes population 1/3; population transfer cannot show.
  CHECK(std::abs(sorkin_s3(probability_table(c))) < 1e-12);
  oracle::Setup s;
  s.method = oracle::Method::spontaneous;
  s.cycles = 3;
  s.delta_tau = c.params.zeeman_ground * tritter_time(c.params);
  CHECK(std::abs(oracle::s3(oracle::table(s))) < 1e-12);

  // With a population readout the recycled population breaks the identity.
  c.closing = ComplexMatrix::Identity(3, 3);
  s.population_readout = true;
  const double expected = -2528.0 / 81675.0;
  CHECK(std::abs(sorkin_s3(probability_table(c)) - expected) < 1e-13);
  CHECK(std::abs(oracle::s3(oracle::table(s)) - expected) < 1e-13);
  c.cycles = 2;
  CHECK(std::abs(sorkin_s3(probability_table(c))) < 1e-12);
}

TEST_CASE("coherence bias: closed form, bound and parity") {
  for (double x : dense_grid()) {
    for (double phi : {-0.05, -0.01, -1e-3, 1e-3, 5e-3, 0.05}) {
      RunConfig c = config_for(BlockMethod::erase, x);
      c.bias_phi = phi;
      const double s3 = sorkin_s3(probability_table(c));
      CHECK(std::abs(s3 - bias_formula(x, phi)) < 1e-12);
      CHECK(std::abs(s3) <= std::abs(phi));
    }
  }
  // Exactly odd only where 2 cos x + cos 2x = 0.
  const double x_odd = std::acos((std::sqrt(3.0) - 1) / 2);
  RunConfig plus = config_for(BlockMethod::dephase, x_odd), minus = plus;
  plus.bias_phi = 0.02;
  minus.bias_phi = -0.02;
  CHECK(std::abs(sorkin_s3(probability_table(plus)) + sorkin_s3(probability_table(minus))) < 1e-12);
}

TEST_CASE("imperfect tritter phases") {
  const RunConfig c = config_for(BlockMethod::erase, pi / 3);
  CHECK(std::abs(tritter_phase_systematic(c, 0.0, 0.0)) < 1e-12);
  for (int trial = 0; trial < 100; ++trial) {
    RunConfig cm = config_for(static_cast<BlockMethod>(trial % 3), testing::uniform(0, 4 * pi));
    CHECK(std::abs(tritter_phase_systematic(cm, testing::uniform(0, 2 * pi),
                                            testing::uniform(0, 2 * pi))) < 1e-12);
  }
}

TEST_CASE("run config validation") {
  RunConfig c;
  c.cycles = 2;
  CHECK_THROWS(c.validate());
  c.method = BlockMethod::spontaneous;
  CHECK_NOTHROW(c.validate());
  c.closing = 2.0 * ComplexMatrix::Identity(3, 3);
  CHECK_THROWS(c.validate());
  RunConfig d;
  d.delta_t = NAN;
  CHECK_THROWS(d.validate());
}

TEST_CASE("evolution time") {
  RunConfig c;
  c.delta_t = pi;
  CHECK(evolution_time(c) == doctest::Approx(pi / c.params.zeeman_ground));
}

}  // TEST_SUITE
