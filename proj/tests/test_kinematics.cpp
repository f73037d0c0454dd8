#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

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

Direction mercedes(int j) { return {0.5, 2.0 * (j + 1) * constants::pi / 3.0}; }

}  // namespace

TEST_CASE("config validation rejects unphysical setups") {
  ScatterConfig cfg = fig_beam();
  CHECK_NOTHROW(validate_config(cfg));
  cfg.omega0 = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = fig_beam();
  cfg.e_i = 0.5 * m_e;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = fig_beam();
  cfg.eps = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = fig_beam();
  cfg.eps = cfg.omega0 + 1.0;  // exceeds the available energy budget
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
}

TEST_CASE("polarization basis is orthonormal and transverse") {
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> uth(0.01, constants::pi - 0.01);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * constants::pi);
  for (int trial = 0; trial < 200; ++trial) {
    const Direction d{uth(gen), uph(gen)};
    const auto [e1, e2] = polarization_basis(d);
    const FourVector k = photon_four_vector(1.0, d);
    CHECK(std::abs(minkowski_dot(e1, e1) + 1.0) < 1e-14);
    CHECK(std::abs(minkowski_dot(e2, e2) + 1.0) < 1e-14);
    CHECK(std::abs(minkowski_dot(e1, e2)) < 1e-14);
    CHECK(std::abs(minkowski_dot(e1, k)) < 1e-14);
    CHECK(std::abs(minkowski_dot(e2, k)) < 1e-14);
    CHECK(e1.t == 0.0);
    CHECK(e2.t == 0.0);
  }
}

TEST_CASE("closure energy matches an independent bisection solve") {
  const ScatterConfig cfg = fig_beam();
  const FourVector p_i = incoming_electron(cfg);
  const FourVector k0 = incoming_photon(cfg);
  std::mt19937 gen(29);
  std::uniform_real_distribution<double> uw(0.005, 0.08);
  std::uniform_real_distribution<double> uth(0.1, constants::pi - 0.1);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * constants::pi);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const FourVector k1 = photon_four_vector(uw(gen), Direction{uth(gen), uph(gen)});
    const FourVector k2 = photon_four_vector(uw(gen), Direction{uth(gen), uph(gen)});
    const Direction d3{uth(gen), uph(gen)};
    double w3;
    try {
      w3 = solve_omega3(p_i, k0, k1, k2, d3);
    } catch (const KinematicsError&) {
      continue;
    }
    if (!(w3 > 0.0)) continue;
    const double ref = testsupport::bisect_closure(p_i, k0, k1, k2, d3, cfg.omega0);
    CHECK(w3 == doctest::Approx(ref).epsilon(1e-9));
    ++solved;
  }
  CHECK(solved > 100);
}

TEST_CASE("assembled points conserve four-momentum on shell") {
  const ScatterConfig cfg = fig_beam();
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> uw(0.004, 0.1);
  std::uniform_real_distribution<double> uth(0.05, constants::pi - 0.05);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * constants::pi);
  int accepted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const PhotonLeg l1{uw(gen), {uth(gen), uph(gen)}, 1};
    const PhotonLeg l2{uw(gen), {uth(gen), uph(gen)}, 1};
    const Direction d3{uth(gen), uph(gen)};
    const TcKinematicPoint pt = build_tc_point(cfg, l1, l2, d3);
    if (!pt.allowed) continue;
    ++accepted;
    const double scale = cfg.e_i + cfg.omega0;
    const FourVector balance = pt.p_i + pt.k0 - pt.k1 - pt.k2 - pt.k3 - pt.p_f;
    CHECK(std::abs(balance.t) < 1e-10 * scale);
    CHECK(std::abs(balance.x) < 1e-10 * scale);
    CHECK(std::abs(balance.y) < 1e-10 * scale);
    CHECK(std::abs(balance.z) < 1e-10 * scale);
    CHECK(std::abs(minkowski_norm2(pt.p_f) - m_e * m_e) < 1e-10 * m_e * m_e);
    CHECK(std::abs(minkowski_norm2(pt.k3)) < 1e-10 * scale * scale);
  }
  CHECK(accepted > 150);
}

TEST_CASE("energy jacobian matches a finite difference") {
  const ScatterConfig cfg = fig_beam();
  const FourVector p_i = incoming_electron(cfg);
  const FourVector k0 = incoming_photon(cfg);
  const FourVector k1 = photon_four_vector(0.03, mercedes(0));
  const FourVector k2 = photon_four_vector(0.025, mercedes(1));
  const Direction d3 = mercedes(2);
  const double w3 = solve_omega3(p_i, k0, k1, k2, d3);
  REQUIRE(w3 > 0.0);
  const FourVector n3 = null_direction(d3);
  auto e_total = [&](double w) {
    const FourVector q{0.0, p_i.x + k0.x - k1.x - k2.x - w * n3.x,
                       p_i.y + k0.y - k1.y - k2.y - w * n3.y,
                       p_i.z + k0.z - k1.z - k2.z - w * n3.z};
    return std::sqrt(m_e * m_e + q.x * q.x + q.y * q.y + q.z * q.z) + w;
  };
  const double h = 1e-6 * w3;
  const double fd = (e_total(w3 + h) - e_total(w3 - h)) / (2.0 * h);
  const FourVector p_f = final_electron(p_i, k0, k1 + k2 + photon_four_vector(w3, d3));
  CHECK(energy_jacobian(p_f, d3) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("boundary energy round-trips through the closure solve") {
  const ScatterConfig cfg = fig_beam();
  const FourVector p_i = incoming_electron(cfg);
  const FourVector k0 = incoming_photon(cfg);
  const FourVector P = p_i + k0;
  std::mt19937 gen(37);
  std::uniform_real_distribution<double> uth(0.1, constants::pi - 0.1);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * constants::pi);
  std::uniform_real_distribution<double> uw(0.004, 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    const Direction dj{uth(gen), uph(gen)};
    const Direction dep{uth(gen), uph(gen)};
    const FourVector k_other = photon_four_vector(uw(gen), Direction{uth(gen), uph(gen)});
    const double eps_dep = cfg.eps;
    double wmax;
    try {
      wmax = omega_boundary(P, k_other, dj, dep, eps_dep);
    } catch (const KinematicsError&) {
      continue;
    }
    if (!(wmax > 0.0)) continue;
    // at omega_j = wmax the dependent photon solves to exactly eps_dep
    const double w_dep = solve_omega3(p_i, k0, k_other, photon_four_vector(wmax, dj), dep);
    CHECK(std::abs(w_dep - eps_dep) < 1e-10 * (cfg.e_i + cfg.omega0));
  }
}

TEST_CASE("boundary is monotone decreasing in the other photon energy") {
  const ScatterConfig cfg = fig_beam();
  const FourVector P = incoming_electron(cfg) + incoming_photon(cfg);
  const Direction d1 = mercedes(0), d2 = mercedes(1), d3 = mercedes(2);
  double prev = -1.0;
  for (int i = 0; i < 50; ++i) {
    const double w2 = cfg.eps + (0.12 - cfg.eps) * i / 49.0;
    const double w1max = omega_boundary(P, photon_four_vector(w2, d2), d1, d3, cfg.eps);
    if (i > 0) CHECK(w1max < prev);
    prev = w1max;
  }
}

TEST_CASE("boundary curve is close to a straight line at 180 keV") {
  const ScatterConfig cfg = fig_beam();
  const FourVector P = incoming_electron(cfg) + incoming_photon(cfg);
  const Direction d1 = mercedes(0), d2 = mercedes(1), d3 = mercedes(2);
  const int n = 40;
  const double lo = cfg.eps, hi = 0.12;
  std::vector<double> w1max(n);
  for (int i = 0; i < n; ++i) {
    const double w2 = lo + (hi - lo) * i / (n - 1);
    w1max[static_cast<std::size_t>(i)] =
        omega_boundary(P, photon_four_vector(w2, d2), d1, d3, cfg.eps);
  }
  // near-linear: the curve sags from the straight chord by at most a few
  // percent of the total drop
  const double drop = w1max[0] - w1max[static_cast<std::size_t>(n - 1)];
  REQUIRE(drop > 0.0);
  for (int i = 0; i < n; ++i) {
    const double line = w1max[0] - drop * i / (n - 1);
    CHECK(std::abs(w1max[static_cast<std::size_t>(i)] - line) < 0.03 * drop);
  }
}

TEST_CASE("single Compton point reproduces the Compton line") {
  const ScatterConfig cfg = fig_beam();
  for (int i = 1; i < 20; ++i) {
    const double theta = constants::pi * i / 20.0;
    const ScKinematicPoint pt = build_sc_point(cfg, Direction{theta, 1.3});
    REQUIRE(pt.allowed);
    CHECK(pt.omega1 ==
          doctest::Approx(testsupport::compton_omega1(cfg.omega0, theta)).epsilon(1e-12));
  }
}

TEST_CASE("boost round-trips are exact to 1e-10 at any gamma") {
  std::mt19937 gen(41);
  std::uniform_real_distribution<double> ulog(0.0, std::log(1e5));
  std::uniform_real_distribution<double> uth(1e-8, constants::pi - 1e-8);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * constants::pi);
  std::uniform_real_distribution<double> uw(1e-6, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double e_i = m_e * std::exp(ulog(gen));
    const ZBoost b = rest_frame_boost(e_i);
    const Direction lab{uth(gen), uph(gen)};
    const Direction back = b.to_lab(b.to_rest(lab));
    CHECK(std::abs(back.theta - lab.theta) < 1e-10);
    CHECK(back.phi == lab.phi);
    const double w = uw(gen);
    const double w_back = b.omega_to_lab(b.omega_to_rest(w, lab.theta),
                                         b.to_rest(lab).theta);
    CHECK(std::abs(w_back - w) < 1e-10 * w);
  }
}

// The component-form boost is exact only while the rest-frame opening angles
// stay generic; past gamma ~ 100 the squeezed directions make the pair dot
// product ill-conditioned in cartesian arithmetic.  The stable angle and
// energy maps carry the extreme-gamma contract (round-trip case above).
TEST_CASE("boost preserves Minkowski products of photon pairs") {
  std::mt19937 gen(43);
  std::uniform_real_distribution<double> ulog(0.0, std::log(1e2));
  std::uniform_real_distribution<double> uth(0.01, constants::pi - 0.01);
  std::uniform_real_distribution<double> uph(0.0, 2.0 * constants::pi);
  std::uniform_real_distribution<double> uw(0.01, 5.0);
  int tested = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const ZBoost b = rest_frame_boost(m_e * std::exp(ulog(gen)));
    const FourVector ka = photon_four_vector(uw(gen), Direction{uth(gen), uph(gen)});
    const FourVector kb = photon_four_vector(uw(gen), Direction{uth(gen), uph(gen)});
    const FourVector ra = b.vec_to_rest(ka), rb = b.vec_to_rest(kb);
    const double lab = minkowski_dot(ka, kb);
    // skip draws whose rest directions land nearly parallel: there the dot
    // product's own rounding floor (eps times the term magnitudes) exceeds
    // the tolerance and the comparison carries no information
    if (4.4e-16 * ra.t * rb.t > 0.3e-10 * std::abs(lab)) continue;
    ++tested;
    const double rest = minkowski_dot(ra, rb);
    CHECK(std::abs(lab - rest) < 1e-10 * std::abs(lab));
    const FourVector back = b.vec_to_lab(ra);
    CHECK(std::abs(back.t - ka.t) < 1e-10 * ka.t);
  }
  CHECK(tested >= 250);
}

TEST_CASE("stable doppler factors satisfy their defining identities") {
  const ZBoost b = rest_frame_boost(5e4);
  // (1 - beta cos th')(1 + beta cos th) = 1 - beta^2 when th' is the rest
  // image of th
  const double one_minus_b2 = b.one_minus_beta * (1.0 + b.beta);
  for (double theta : {1e-7, 1e-3, 0.5, constants::pi - 1e-6}) {
    const Direction rest = b.to_rest({theta, 0.0});
    const double prod = b.doppler_rest(rest.theta) * b.codoppler_lab(theta);
    CHECK(prod == doctest::Approx(one_minus_b2).epsilon(1e-12));
  }
  // moderate gamma: one_minus_beta equals the naive 1 - beta
  const ZBoost mod = rest_frame_boost(2.0 * m_e);
  CHECK(mod.one_minus_beta == doctest::Approx(1.0 - mod.beta).epsilon(1e-14));
}

TEST_CASE("lab threshold on rest-frame photons matches the lab energy") {
  const ZBoost b = rest_frame_boost(1e3);
  std::mt19937 gen(47);
  std::uniform_real_distribution<double> uth(0.0, constants::pi);
  std::uniform_real_distribution<double> uw(1e-4, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double th = uth(gen), w = uw(gen);
    const bool pass = lab_threshold_pass(b, w, th, 0.5);
    const double w_lab = b.omega_to_lab(w, th);
    CHECK(pass == (w_lab > 0.5));
  }
}

TEST_CASE("differential and angular jacobians interlock") {
  const ZBoost b = rest_frame_boost(50.0);
  const double one_minus_b2 = b.one_minus_beta * (1.0 + b.beta);
  for (double th1 : {0.2, 1.0}) {
    for (double th2 : {0.7, 2.4}) {
      const double th3 = 1.5;
      const double j = cross_section_jacobian(b, th1, th2, th3);
      const double jt = angular_jacobian(b, th1, th2, th3);
      CHECK(j > 0.0);
      CHECK(jt > 0.0);
      const double ratio = jt / j;
      const double want = one_minus_b2 / (b.doppler_rest(th1) * b.doppler_rest(th2));
      CHECK(ratio == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("rest config carries the doubled doppler-shifted beam energy") {
  ScatterConfig cfg = fig_beam();
  cfg.e_i = 5e4;
  cfg.omega0 = 2.5e-6;
  cfg.eps = 500.0;
  const ZBoost b = rest_frame_boost(cfg.e_i);
  const ScatterConfig rcfg = rest_config(cfg);
  CHECK(rcfg.e_i == doctest::Approx(m_e).epsilon(1e-12));
  CHECK(rcfg.omega0 == doctest::Approx(b.gamma * (1.0 + b.beta) * cfg.omega0).epsilon(1e-12));
  // the known benchmark: 2.5 eV on 50 GeV backscatters near half an MeV
  CHECK(rcfg.omega0 > 0.4);
  CHECK(rcfg.omega0 < 0.6);
}
