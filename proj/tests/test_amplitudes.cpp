#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mcompton/amplitudes.hpp"
#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"
#include "mcompton/kinematics.hpp"
#include "support/oracles.hpp"

using namespace mcompton;

namespace {

const double m_e = constants::electron_mass_mev;

ScatterConfig fig_beam() {
  ScatterConfig cfg;
  cfg.omega0 = 0.18;
  cfg.e_i = m_e;
  cfg.eps = 0.18 / 50.0;
  return cfg;
}

ComplexFourVector lift(const FourVector& v) {
  ComplexFourVector out;
  out.t = v.t;
  out.x = v.x;
  out.y = v.y;
  out.z = v.z;
  return out;
}

struct RandomTcPoint {
  TcKinematicPoint pt;
  bool ok = false;
};

RandomTcPoint random_tc_point(std::mt19937& gen, const ScatterConfig& cfg) {
  std::uniform_real_distribution<double> uw(0.004, 0.09);
  std::uniform_real_distribution<double> uth(0.1, constants::pi - 0.1);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * constants::pi);
  RandomTcPoint out;
  for (int tries = 0; tries < 100; ++tries) {
    const PhotonLeg l1{uw(gen), {uth(gen), uph(gen)}, 1};
    const PhotonLeg l2{uw(gen), {uth(gen), uph(gen)}, 1};
    const Direction d3{uth(gen), uph(gen)};
    const TcKinematicPoint pt = build_tc_point(cfg, l1, l2, d3);
    if (pt.allowed && pt.k3.t > 1e-4) {
      out.pt = pt;
      out.ok = true;
      return out;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("ordering lists enumerate each permutation exactly once") {
  CHECK(sc_orderings().size() == 2);
  CHECK(dc_orderings().size() == 6);
  CHECK(tc_orderings().size() == 24);
  for (const auto& o : tc_orderings()) {
    int mask = 0;
    for (int j : o) mask |= 1 << j;
    CHECK(mask == 15);
  }
}

TEST_CASE("tc amplitude matches the brute-force chain product") {
  const ScatterConfig cfg = fig_beam();
  std::mt19937 gen(53);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const RandomTcPoint rp = random_tc_point(gen, cfg);
    if (!rp.ok) continue;
    const TcKinematicPoint& pt = rp.pt;
    const std::array<FourVector, 4> k{pt.k0, pt.k1, pt.k2, pt.k3};
    for (int l0 : {1, 2})
      for (int l1 : {1, 2}) {
        const std::array<ComplexFourVector, 4> eps{
            lift(polarization_vector(Direction{0.0, 0.0}, l0)),
            lift(polarization_vector(pt.dir1, l1)),
            lift(polarization_vector(pt.dir2, 2)),
            lift(polarization_vector(pt.dir3, 1))};
        for (int ri : {1, 2})
          for (int rf : {1, 2}) {
            const cplx got = n_tc(pt.p_i, ri, pt.p_f, rf, k, eps);
            const cplx want = testsupport::naive_amplitude(pt.p_i, ri, pt.p_f, rf, k, eps);
            CHECK(std::abs(got - want) <= 1e-10 * std::abs(want) + 1e-16);
            ++checked;
          }
      }
  }
  CHECK(checked >= 32);
}

TEST_CASE("dc and sc amplitudes match the brute-force chain product") {
  const ScatterConfig cfg = fig_beam();
  std::mt19937 gen(59);
  std::uniform_real_distribution<double> uw(0.01, 0.1);
  std::uniform_real_distribution<double> uth(0.2, constants::pi - 0.2);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * constants::pi);
  for (int trial = 0; trial < 10; ++trial) {
    const DcKinematicPoint dc =
        build_dc_point(cfg, PhotonLeg{uw(gen), {uth(gen), uph(gen)}, 1},
                       Direction{uth(gen), uph(gen)});
    if (dc.allowed && dc.omega2 > 1e-4) {
      const std::array<FourVector, 3> k{dc.k0, dc.k1, dc.k2};
      const std::array<ComplexFourVector, 3> eps{
          lift(polarization_vector(Direction{0.0, 0.0}, 1)),
          lift(polarization_vector(dc.dir1, 2)), lift(polarization_vector(dc.dir2, 1))};
      const cplx got = n_dc(dc.p_i, 1, dc.p_f, 2, k, eps);
      const cplx want = testsupport::naive_amplitude(dc.p_i, 1, dc.p_f, 2, k, eps);
      CHECK(std::abs(got - want) <= 1e-10 * std::abs(want) + 1e-16);
    }
    const ScKinematicPoint sc = build_sc_point(cfg, Direction{uth(gen), uph(gen)});
    REQUIRE(sc.allowed);
    const std::array<FourVector, 2> ksc{sc.k0, sc.k1};
    const std::array<ComplexFourVector, 2> epssc{
        lift(polarization_vector(Direction{0.0, 0.0}, 2)),
        lift(polarization_vector(sc.dir1, 1))};
    const cplx got = n_sc(sc.p_i, 2, sc.p_f, 1, ksc, epssc);
    const cplx want = testsupport::naive_amplitude(sc.p_i, 2, sc.p_f, 1, ksc, epssc);
    CHECK(std::abs(got - want) <= 1e-10 * std::abs(want) + 1e-16);
  }
}

TEST_CASE("channel tables agree with one-channel evaluations") {
  const ScatterConfig cfg = fig_beam();
  std::mt19937 gen(61);
  const RandomTcPoint rp = random_tc_point(gen, cfg);
  REQUIRE(rp.ok);
  const TcKinematicPoint& pt = rp.pt;
  const TcChannelTable table = tc_channel_table(pt);
  const std::array<FourVector, 4> k{pt.k0, pt.k1, pt.k2, pt.k3};
  for (int ri : {1, 2})
    for (int rf : {1, 2})
      for (int l0 : {1, 2})
        for (int l1 : {1, 2})
          for (int l2 : {1, 2})
            for (int l3 : {1, 2}) {
              const std::array<ComplexFourVector, 4> eps{
                  lift(polarization_vector(Direction{0.0, 0.0}, l0)),
                  lift(polarization_vector(pt.dir1, l1)),
                  lift(polarization_vector(pt.dir2, l2)),
                  lift(polarization_vector(pt.dir3, l3))};
              const cplx one = n_tc(pt.p_i, ri, pt.p_f, rf, k, eps);
              const cplx tab = table.at(ri, rf, l0, l1, l2, l3);
              CHECK(std::abs(one - tab) <= 1e-12 * std::abs(one) + 1e-18);
            }
}

TEST_CASE("amplitude is gauge invariant leg by leg") {
  const ScatterConfig cfg = fig_beam();
  std::mt19937 gen(67);
  std::uniform_real_distribution<double> uc(-2.0, 2.0);
  const RandomTcPoint rp = random_tc_point(gen, cfg);
  REQUIRE(rp.ok);
  const TcKinematicPoint& pt = rp.pt;
  const std::array<FourVector, 4> k{pt.k0, pt.k1, pt.k2, pt.k3};
  const std::array<ComplexFourVector, 4> eps0{
      lift(polarization_vector(Direction{0.0, 0.0}, 1)),
      lift(polarization_vector(pt.dir1, 1)), lift(polarization_vector(pt.dir2, 2)),
      lift(polarization_vector(pt.dir3, 1))};
  const cplx base = n_tc(pt.p_i, 1, pt.p_f, 2, k, eps0);
  REQUIRE(std::abs(base) > 0.0);
  for (int leg = 0; leg < 4; ++leg) {
    for (int trial = 0; trial < 5; ++trial) {
      const cplx a{uc(gen), uc(gen)};
      std::array<ComplexFourVector, 4> eps = eps0;
      const FourVector& kv = k[static_cast<std::size_t>(leg)];
      auto& e = eps[static_cast<std::size_t>(leg)];
      e.t += a * kv.t;
      e.x += a * kv.x;
      e.y += a * kv.y;
      e.z += a * kv.z;
      const cplx shifted = n_tc(pt.p_i, 1, pt.p_f, 2, k, eps);
      CHECK(std::abs(shifted - base) <= 1e-9 * std::abs(base));
    }
  }
}

TEST_CASE("amplitude is symmetric under exchange of emitted photons") {
  const ScatterConfig cfg = fig_beam();
  std::mt19937 gen(71);
  const RandomTcPoint rp = random_tc_point(gen, cfg);
  REQUIRE(rp.ok);
  const TcKinematicPoint& pt = rp.pt;
  const std::array<FourVector, 4> k{pt.k0, pt.k1, pt.k2, pt.k3};
  const std::array<ComplexFourVector, 4> eps{
      lift(polarization_vector(Direction{0.0, 0.0}, 1)),
      lift(polarization_vector(pt.dir1, 2)), lift(polarization_vector(pt.dir2, 1)),
      lift(polarization_vector(pt.dir3, 1))};
  const cplx base = n_tc(pt.p_i, 2, pt.p_f, 1, k, eps);
  // swap photons 1 and 2 (momenta together with polarizations)
  const std::array<FourVector, 4> k_sw{pt.k0, pt.k2, pt.k1, pt.k3};
  const std::array<ComplexFourVector, 4> eps_sw{eps[0], eps[2], eps[1], eps[3]};
  const cplx swapped = n_tc(pt.p_i, 2, pt.p_f, 1, k_sw, eps_sw);
  CHECK(std::abs(swapped - base) <= 1e-12 * std::abs(base));
  // swap photons 2 and 3
  const std::array<FourVector, 4> k_sw2{pt.k0, pt.k1, pt.k3, pt.k2};
  const std::array<ComplexFourVector, 4> eps_sw2{eps[0], eps[1], eps[3], eps[2]};
  const cplx swapped2 = n_tc(pt.p_i, 2, pt.p_f, 1, k_sw2, eps_sw2);
  CHECK(std::abs(swapped2 - base) <= 1e-12 * std::abs(base));
}

TEST_CASE("degenerate propagator throws instead of returning garbage") {
  const ScatterConfig cfg = fig_beam();
  const ScKinematicPoint sc = build_sc_point(cfg, Direction{1.0, 0.5});
  REQUIRE(sc.allowed);
  // a zero-energy emitted photon puts one ordering's propagator on shell
  const std::array<FourVector, 3> k{sc.k0, sc.k1, FourVector{}};
  const std::array<ComplexFourVector, 3> eps{
      lift(polarization_vector(Direction{0.0, 0.0}, 1)),
      lift(polarization_vector(sc.dir1, 1)), lift(polarization_vector(Direction{1.0, 1.0}, 1))};
  CHECK_THROWS_AS((void)n_dc(sc.p_i, 1, sc.p_f, 1, k, eps), KinematicsError);
}

TEST_CASE("channel sums vary smoothly along a polar-angle scan") {
  ScatterConfig cfg = fig_beam();
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double theta = 0.5 + 1.5 * i / 100.0;
    const Direction d1{theta, 2.0 * constants::pi / 3.0};
    const Direction d2{theta, 4.0 * constants::pi / 3.0};
    const Direction d3{theta, 2.0 * constants::pi};
    const TcKinematicPoint pt =
        build_tc_point(cfg, PhotonLeg{0.03, d1, 1}, PhotonLeg{0.03, d2, 1}, d3);
    REQUIRE(pt.allowed);
    const TcChannelTable table = tc_channel_table(pt);
    double sum = 0.0;
    for (const cplx& z : table.n) {
      CHECK(std::isfinite(z.real()));
      CHECK(std::isfinite(z.imag()));
      sum += std::norm(z);
    }
    CHECK(sum > 0.0);
    if (i > 0) {
      CHECK(sum < 2.0 * prev);
      CHECK(sum > 0.5 * prev);
    }
    prev = sum;
  }
}
