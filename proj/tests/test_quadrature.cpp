#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mcompton/constants.hpp"
#include "mcompton/quadrature.hpp"
#include "mcompton/xsec.hpp"

using namespace mcompton;

TEST_CASE("compensated accumulator is independent of summation order") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(20000);
  for (double& x : xs) x = std::pow(10.0, 8.0 * u(gen) - 4.0);  // wide dynamic range
  DoubleDouble fwd;
  for (double x : xs) fwd.add(x);
  std::shuffle(xs.begin(), xs.end(), gen);
  DoubleDouble shuf;
  for (double x : xs) shuf.add(x);
  CHECK(fwd.value() == shuf.value());

  // grouping into partial accumulators must not change the rounded total
  std::array<DoubleDouble, 7> parts{};
  for (std::size_t i = 0; i < xs.size(); ++i) parts[i % 7].add(xs[i]);
  std::sort(xs.begin(), xs.end());
  DoubleDouble sorted;
  for (double x : xs) sorted.add(x);
  CHECK(sorted.value() == fwd.value());
}

TEST_CASE("romberg reproduces closed-form integrals") {
  RombergOptions opt{1e-12, 14, 0.0};
  const RombergResult cubic = romberg([](double x) { return x * x * x; }, 0.0, 1.0, opt);
  CHECK(cubic.converged);
  CHECK(cubic.value == doctest::Approx(0.25).epsilon(1e-12));

  const RombergResult logint = romberg([](double x) { return 1.0 / x; }, 1.0, 2.0, opt);
  CHECK(logint.converged);
  CHECK(logint.value == doctest::Approx(std::log(2.0)).epsilon(1e-11));

  const RombergResult sine = romberg([](double x) { return std::sin(x); }, 0.0,
                                     constants::pi, opt);
  CHECK(sine.converged);
  CHECK(sine.value == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("romberg reports non-convergence instead of lying") {
  // kink at an irrational point defeats Richardson extrapolation at this tol
  RombergOptions opt{1e-13, 6, 0.0};
  const RombergResult r =
      romberg([](double x) { return std::abs(x - 0.3337777); }, 0.0, 1.0, opt);
  CHECK_FALSE(r.converged);
}

TEST_CASE("empty integration regions come back empty") {
  ScatterConfig cfg;
  cfg.omega0 = 0.18;
  cfg.e_i = constants::electron_mass_mev;
  cfg.eps = 0.0036;
  const Direction d1{0.5, 2.0 * constants::pi / 3.0};
  const Direction d2{0.5, 4.0 * constants::pi / 3.0};
  const Direction d3{0.5, 2.0 * constants::pi};
  // thresholds so large no emitted pair fits in the energy budget
  const EnergyCuts cuts{0.09, 0.09, 0.09};
  const EnergyIntegral r = integrate_energies_tc(cfg, d1, d2, d3, cuts, RombergOptions{},
                                                 [](double, double) { return 1.0; });
  CHECK(r.empty);
  CHECK(r.value == 0.0);
}

TEST_CASE("dc energy integral matches a direct quadrature of the same integrand") {
  ScatterConfig cfg;
  cfg.omega0 = 0.18;
  cfg.e_i = constants::electron_mass_mev;
  cfg.eps = 0.0036;
  const Direction d1{1.1, 2.0 * constants::pi / 3.0};
  const Direction d2{0.8, 4.0 * constants::pi / 3.0};
  const EnergyCuts cuts{cfg.eps, cfg.eps, 0.0};
  auto f = [&](double w1) {
    const DcKinematicPoint pt = build_dc_point(cfg, PhotonLeg{w1, d1, 1}, d2);
    if (!pt.allowed) return 0.0;
    return dc_prefactor(pt) * channel_sum_all(dc_channel_table(pt));
  };
  const EnergyIntegral a = integrate_energies_dc(cfg, d1, d2, cuts, RombergOptions{1e-9, 14}, f);
  CHECK(a.converged);
  CHECK(a.value > 0.0);

  // same integral, linear variable, no shared code path in the limits
  const FourVector P = incoming_electron(cfg) + incoming_photon(cfg);
  const double w1max = std::min(omega_boundary(P, FourVector{}, d1, d2, cfg.eps),
                                cfg.omega0 - cfg.eps);
  const RombergResult b = romberg(f, cfg.eps, w1max, RombergOptions{1e-10, 16});
  CHECK(b.converged);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-7));
}

TEST_CASE("energy-integrated dc value is invariant under leg relabeling") {
  ScatterConfig cfg;
  cfg.omega0 = 0.18;
  cfg.e_i = constants::electron_mass_mev;
  cfg.eps = 0.0036;
  const Direction d1{1.0, 2.0 * constants::pi / 3.0};
  const Direction d2{1.0, 4.0 * constants::pi / 3.0};
  const RombergOptions opt{1e-10, 14};
  auto spin_pol_sum = [&](const Direction& da, const Direction& db) {
    return integrate_energies_dc(cfg, da, db, EnergyCuts{cfg.eps, cfg.eps, 0.0}, opt,
                                 [&](double w1) {
                                   const DcKinematicPoint pt =
                                       build_dc_point(cfg, PhotonLeg{w1, da, 1}, db);
                                   if (!pt.allowed) return 0.0;
                                   return dc_prefactor(pt) *
                                          channel_sum_all(dc_channel_table(pt));
                                 });
  };
  const EnergyIntegral ab = spin_pol_sum(d1, d2);
  const EnergyIntegral ba = spin_pol_sum(d2, d1);
  CHECK(ab.converged);
  CHECK(ba.converged);
  CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-8));
}

TEST_CASE("monte carlo total is independent of the thread count") {
  ScatterConfig cfg;
  cfg.omega0 = 0.001;
  cfg.e_i = constants::electron_mass_mev;
  cfg.eps = cfg.omega0 / 50.0;
  McOptions a;
  a.seed = 9;
  a.samples = 2000;
  a.shards = 16;
  a.threads = 1;
  McOptions b = a;
  b.threads = 4;
  const IntegralEstimate ra = total_cross_section(Process::SC, cfg, a);
  const IntegralEstimate rb = total_cross_section(Process::SC, cfg, b);
  CHECK(ra.value == rb.value);  // bitwise: ordered shard reduction
  CHECK(ra.stderror == rb.stderror);
}

TEST_CASE("monte carlo single Compton total agrees with the closed form") {
  ScatterConfig cfg;
  cfg.omega0 = 0.001;
  cfg.e_i = constants::electron_mass_mev;
  cfg.eps = cfg.omega0 / 50.0;  // far below every scattered photon energy
  McOptions mc;
  mc.seed = 4242;
  mc.samples = 4000;
  const IntegralEstimate est = total_cross_section(Process::SC, cfg, mc);
  const double ref = sigma_sc_total(cfg.omega0);
  CHECK(est.stderror > 0.0);
  CHECK(std::abs(est.value - ref) < 5.0 * est.stderror);
  CHECK(std::abs(est.value - ref) / ref < 0.05);
}
