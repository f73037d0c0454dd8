#ifndef MCOMPTON_QUADRATURE_HPP
#define MCOMPTON_QUADRATURE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "mcompton/errors.hpp"
#include "mcompton/kinematics.hpp"

namespace mcompton {

/**
 * Double-double accumulator (TwoSum compensation).  Monte Carlo weight sums
 * use this so that re-grouping the same samples into different shard
 * partitions reproduces the identical rounded total.
 */
struct DoubleDouble {
  double hi = 0.0, lo = 0.0;

  void add(double x) {
    const double s = hi + x;
    const double bv = s - hi;
    const double err = (hi - (s - bv)) + (x - bv);
    hi = s;
    lo += err;
  }
  void add(const DoubleDouble& o) {
    add(o.hi);
    lo += o.lo;
  }
  double value() const { return hi + lo; }
};

struct RombergOptions {
  double rel_tol = 1e-6;
  int max_level = 12;     // trapezoid refinements; 2^max_level + 1 abscissae
  double abs_floor = 0.0; // treat |I| below this as converged-by-smallness
};

struct RombergResult {
  double value = 0.0;
  int level = 0;
  bool converged = false;
};

/**
 * Romberg integration on [a,b]: iterated trapezoid refinement with
 * Richardson extrapolation.  Convergence is judged on the diagonal:
 * |R(k,k) - R(k-1,k-1)| <= rel_tol*|R(k,k)| + abs_floor.
 */
template <class F>
RombergResult romberg(F&& f, double a, double b, const RombergOptions& opt = {}) {
  RombergResult res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  std::vector<double> row(static_cast<size_t>(opt.max_level) + 1, 0.0);
  double h = b - a;
  row[0] = 0.5 * h * (f(a) + f(b));
  double prev_diag = row[0];
  for (int k = 1; k <= opt.max_level; ++k) {
    // refine trapezoid with the new midpoints
    const std::int64_t n_new = std::int64_t{1} << (k - 1);
    double sum = 0.0;
    const double h2 = h * 0.5;
    for (std::int64_t i = 0; i < n_new; ++i) sum += f(a + h2 + static_cast<double>(i) * h);
    const double trap = 0.5 * row[0] + h2 * sum;
    // Richardson sweep in place
    double prev = row[0];
    row[0] = trap;
    double pow4 = 4.0;
    for (int j = 1; j <= k; ++j) {
      const double cur = row[j - 1] + (row[j - 1] - prev) / (pow4 - 1.0);
      prev = row[j];
      row[j] = cur;
      pow4 *= 4.0;
    }
    h = h2;
    const double diag = row[k];
    if (k >= 2 && std::abs(diag - prev_diag) <= opt.rel_tol * std::abs(diag) + opt.abs_floor) {
      res.value = diag;
      res.level = k;
      res.converged = true;
      return res;
    }
    prev_diag = diag;
  }
  res.value = prev_diag;
  res.level = opt.max_level;
  res.converged = false;
  return res;
}

/**
 * Romberg after the tanh-sinh endpoint substitution
 *   x = mid + half*tanh((pi/2) sinh u),  u in [-3, 3].
 * Node density rises double-exponentially toward both endpoints, so
 * integrable endpoint structure and branch points just past an endpoint
 * (phase-space boundary layers) stop limiting the convergence order.
 */
template <class F>
RombergResult romberg_de(F&& f, double a, double b, const RombergOptions& opt = {}) {
  if (!(b > a)) {
    RombergResult res;
    res.converged = true;
    return res;
  }
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double q = 1.5707963267948966;
  auto g = [&](double u) {
    const double s = std::sinh(u);
    const double t = std::tanh(q * s);
    const double c = std::cosh(q * s);
    const double w = half * q * std::cosh(u) / (c * c);
    if (!(w > 0.0) || !std::isfinite(w)) return 0.0;  // weight underflow at the rim
    return w * f(mid + half * t);
  };
  return romberg(g, -3.0, 3.0, opt);
}

/** Per-leg infrared thresholds, in the same frame as the integration. */
struct EnergyCuts {
  double eps1 = 0.0, eps2 = 0.0, eps3 = 0.0;
};

struct EnergyIntegral {
  double value = 0.0;
  bool converged = true;  // false if any Romberg stage hit max_level
  bool empty = false;
};

/**
 * TC emitted-energy integral at fixed directions:
 *   int_{eps2}^{w2max} dw2 int_{eps1}^{w1max(w2)} dw1 f(w1, w2)
 * with the region boundary where the closure photon reaches eps3.  Both
 * integrals run in log(omega) to tame the soft-photon 1/omega behaviour.
 * The integrand must NOT apply infrared cuts itself; the limits do.
 */
template <class F2>
EnergyIntegral integrate_energies_tc(const ScatterConfig& cfg, const Direction& d1,
                                     const Direction& d2, const Direction& d3,
                                     const EnergyCuts& cuts, const RombergOptions& opt,
                                     F2&& f) {
  EnergyIntegral out;
  const FourVector p_i = incoming_electron(cfg);
  const FourVector k0 = incoming_photon(cfg);
  const FourVector P = p_i + k0;
  const double m = std::sqrt(minkowski_norm2(p_i));
  // energy conservation caps the boundary value even when the closure
  // denominator is nearly degenerate
  const double cap2 = cfg.e_i + cfg.omega0 - m - cuts.eps1 - cuts.eps3;
  double w2max;
  try {
    w2max = omega_boundary(P, photon_four_vector(cuts.eps1, d1), d2, d3, cuts.eps3);
  } catch (const KinematicsError&) {
    out.empty = true;
    return out;
  }
  w2max = std::min(w2max, cap2);
  if (!(w2max > cuts.eps2)) {
    out.empty = true;
    return out;
  }
  const double cap1 = cfg.e_i + cfg.omega0 - m - cuts.eps2 - cuts.eps3;
  bool inner_ok = true;
  auto outer = [&](double t2) {
    const double w2 = std::exp(t2);
    double w1max;
    try {
      w1max = omega_boundary(P, photon_four_vector(w2, d2), d1, d3, cuts.eps3);
    } catch (const KinematicsError&) {
      return 0.0;
    }
    w1max = std::min(w1max, cap1);
    if (!(w1max > cuts.eps1)) return 0.0;
    auto inner = [&](double t1) {
      const double w1 = std::exp(t1);
      return w1 * f(w1, w2);
    };
    const RombergResult r = romberg_de(inner, std::log(cuts.eps1), std::log(w1max), opt);
    if (!r.converged) inner_ok = false;
    return w2 * r.value;
  };
  const RombergResult r2 = romberg_de(outer, std::log(cuts.eps2), std::log(w2max), opt);
  out.value = r2.value;
  out.converged = r2.converged && inner_ok;
  return out;
}

/** DC analog: a single emitted-energy integral, boundary at omega2 = eps2. */
template <class F1>
EnergyIntegral integrate_energies_dc(const ScatterConfig& cfg, const Direction& d1,
                                     const Direction& d2, const EnergyCuts& cuts,
                                     const RombergOptions& opt, F1&& f) {
  EnergyIntegral out;
  const FourVector p_i = incoming_electron(cfg);
  const FourVector k0 = incoming_photon(cfg);
  const FourVector P = p_i + k0;
  const double m = std::sqrt(minkowski_norm2(p_i));
  double w1max;
  try {
    w1max = omega_boundary(P, FourVector{}, d1, d2, cuts.eps2);
  } catch (const KinematicsError&) {
    out.empty = true;
    return out;
  }
  w1max = std::min(w1max, cfg.e_i + cfg.omega0 - m - cuts.eps2);
  if (!(w1max > cuts.eps1)) {
    out.empty = true;
    return out;
  }
  auto g = [&](double t1) {
    const double w1 = std::exp(t1);
    return w1 * f(w1);
  };
  const RombergResult r = romberg_de(g, std::log(cuts.eps1), std::log(w1max), opt);
  out.value = r.value;
  out.converged = r.converged;
  return out;
}

enum class Process { SC, DC, TC };

struct McOptions {
  std::uint64_t seed = 1;
  std::int64_t samples = 10000;
  int shards = 64;
  int threads = 1;
};

struct IntegralEstimate {
  double value = 0.0;    // barn
  double stderror = 0.0; // barn, from per-sample weight variance
  std::int64_t samples = 0;
  int shards = 0;
  std::int64_t flagged = 0;  // samples the estimator could not evaluate reliably
  std::uint64_t seed = 0;
};

/**
 * Polarization- and spin-summed total cross section with the 1/n! identical
 * particle factor and 1/4 initial-state average.  Directions are drawn from a
 * mixture of uniform and forward-peaked polar proposals (importance weighted,
 * so the estimate stays unbiased) and emitted energies log-uniformly between
 * the infrared threshold and the energy-budget cap, with the closure photon's
 * cut applied by rejection.  Configs with e_i > m are evaluated in the electron rest frame
 * (the total is invariant), with the infrared threshold applied to lab-frame
 * photon energies.
 */
IntegralEstimate total_cross_section(Process process, const ScatterConfig& cfg,
                                     const McOptions& mc);

}  // namespace mcompton

#endif
