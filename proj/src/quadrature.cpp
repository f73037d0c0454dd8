#include "mcompton/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"
#include "mcompton/rng.hpp"
#include "mcompton/xsec.hpp"

namespace mcompton {

namespace {

constexpr double kFourPi = 4.0 * constants::pi;
constexpr double kTwoPi = 2.0 * constants::pi;

struct ShardAccumulator {
  DoubleDouble w, w2;
  std::int64_t flagged = 0;
};

struct SampleContext {
  ScatterConfig rcfg;      // rest-frame config (identical to cfg when beta = 0)
  ZBoost boost;            // lab <-> rest
  double eps_lab = 0.0;
  bool boosted = false;
};

double effective_threshold(const SampleContext& ctx, double theta_rest) {
  if (!ctx.boosted) return ctx.eps_lab;
  return ctx.eps_lab / (ctx.boost.gamma * ctx.boost.doppler_rest(theta_rest));
}

// Polar proposal for emitted photons: equal mixture of uniform cos(theta)
// and log-uniform x = 1 - cos(theta) down to half the squared cone scale
// (m/W)^2, W the total energy.  Hard photons cluster within an angle m/E_f
// of the forward final electron, so the weight tail lives at x well below
// the backscatter scale m/omega0; the uniform half keeps full support, so
// rejection stays unbiased.
struct PolarDraw {
  double cos_theta;
  double density;  // over d cos(theta)
};

PolarDraw sample_polar(double x_min, double log_width, double u) {
  double x;
  if (u < 0.5) {
    x = 4.0 * u;
  } else {
    x = x_min * std::exp(log_width * (2.0 * u - 1.0));
  }
  const double q = 0.25 + (x >= x_min ? 0.5 / (x * log_width) : 0.0);
  return {1.0 - x, q};
}

// Emitted energies are importance sampled log-uniformly between the per-leg
// infrared threshold and the energy-budget cap; the soft 1/omega enhancement
// then drops out of the weight.  The box always covers the allowed region
// (E_f >= m bounds every leg), and closure or cut violations reject with
// weight zero, so the estimate is unbiased.
double tc_sample_weight(const SampleContext& ctx, const double* u, bool* converged) {
  *converged = true;
  const double m = std::sqrt(minkowski_norm2(incoming_electron(ctx.rcfg)));
  const double w_total = ctx.rcfg.e_i + ctx.rcfg.omega0;
  const double x_min = 0.5 * (m / w_total) * (m / w_total);
  const double lw = std::log(2.0 / x_min);
  const PolarDraw c1 = sample_polar(x_min, lw, u[0]);
  const PolarDraw c2 = sample_polar(x_min, lw, u[2]);
  const PolarDraw c3 = sample_polar(x_min, lw, u[4]);
  const Direction d1{std::acos(c1.cos_theta), 2.0 * constants::pi * u[1]};
  const Direction d2{std::acos(c2.cos_theta), 2.0 * constants::pi * u[3]};
  const Direction d3{std::acos(c3.cos_theta), 2.0 * constants::pi * u[5]};
  const double e1 = effective_threshold(ctx, d1.theta);
  const double e2 = effective_threshold(ctx, d2.theta);
  const double e3 = effective_threshold(ctx, d3.theta);
  const double avail = ctx.rcfg.e_i + ctx.rcfg.omega0 - m;
  const double cap1 = avail - e2 - e3, cap2 = avail - e1 - e3;
  if (!(cap1 > e1) || !(cap2 > e2)) return 0.0;
  const double l1 = std::log(cap1 / e1), l2 = std::log(cap2 / e2);
  const double w1 = e1 * std::exp(l1 * u[6]);
  const double w2 = e2 * std::exp(l2 * u[7]);
  const TcKinematicPoint pt =
      build_tc_point(ctx.rcfg, PhotonLeg{w1, d1, 1}, PhotonLeg{w2, d2, 1}, d3);
  if (!pt.allowed || pt.omega3 < e3) return 0.0;
  const double pref = tc_prefactor(pt);
  if (pref == 0.0) return 0.0;
  double val;
  try {
    val = pref * channel_sum_all(tc_channel_table(pt));
  } catch (const KinematicsError&) {
    return 0.0;  // exactly degenerate propagator: measure-zero point
  }
  const double volume = kTwoPi * kTwoPi * kTwoPi / (c1.density * c2.density * c3.density) *
                        l1 * l2 * w1 * w2;
  return volume * val / (6.0 * 4.0);  // 1/3! identical photons, 1/4 initial average
}

double dc_sample_weight(const SampleContext& ctx, const double* u, bool* converged) {
  *converged = true;
  const double m = std::sqrt(minkowski_norm2(incoming_electron(ctx.rcfg)));
  const double w_total = ctx.rcfg.e_i + ctx.rcfg.omega0;
  const double x_min = 0.5 * (m / w_total) * (m / w_total);
  const double lw = std::log(2.0 / x_min);
  const PolarDraw c1 = sample_polar(x_min, lw, u[0]);
  const PolarDraw c2 = sample_polar(x_min, lw, u[2]);
  const Direction d1{std::acos(c1.cos_theta), 2.0 * constants::pi * u[1]};
  const Direction d2{std::acos(c2.cos_theta), 2.0 * constants::pi * u[3]};
  const double e1 = effective_threshold(ctx, d1.theta);
  const double e2 = effective_threshold(ctx, d2.theta);
  const double cap1 = ctx.rcfg.e_i + ctx.rcfg.omega0 - m - e2;
  if (!(cap1 > e1)) return 0.0;
  const double l1 = std::log(cap1 / e1);
  const double w1 = e1 * std::exp(l1 * u[4]);
  const DcKinematicPoint pt = build_dc_point(ctx.rcfg, PhotonLeg{w1, d1, 1}, d2);
  if (!pt.allowed || pt.omega2 < e2) return 0.0;
  const double pref = dc_prefactor(pt);
  if (pref == 0.0) return 0.0;
  double val;
  try {
    val = pref * channel_sum_all(dc_channel_table(pt));
  } catch (const KinematicsError&) {
    return 0.0;
  }
  const double volume = kTwoPi * kTwoPi / (c1.density * c2.density) * l1 * w1;
  return volume * val / (2.0 * 4.0);
}

double sc_sample_weight(const SampleContext& ctx, const double* u, bool* converged) {
  *converged = true;
  const Direction d1{std::acos(2.0 * u[0] - 1.0), 2.0 * constants::pi * u[1]};
  const ScKinematicPoint pt = build_sc_point(ctx.rcfg, d1);
  if (!pt.allowed) return 0.0;
  if (!(pt.omega1 >= effective_threshold(ctx, d1.theta))) return 0.0;
  const double pref = sc_prefactor(pt);
  if (pref == 0.0) return 0.0;
  double val;
  try {
    val = pref * channel_sum_all(sc_channel_table(pt));
  } catch (const KinematicsError&) {
    return 0.0;
  }
  return kFourPi * val / 4.0;
}

}  // namespace

IntegralEstimate total_cross_section(Process process, const ScatterConfig& cfg,
                                     const McOptions& mc) {
  SampleContext ctx;
  ctx.boost = rest_frame_boost(cfg.e_i);
  ctx.boosted = ctx.boost.beta > 0.0;
  ctx.rcfg = ctx.boosted ? rest_config(cfg) : cfg;
  ctx.eps_lab = cfg.eps;

  const int dim = process == Process::TC ? 8 : (process == Process::DC ? 5 : 2);
  const std::int64_t n = mc.samples;
  const int shards = std::max(1, mc.shards);
  std::vector<ShardAccumulator> acc(static_cast<std::size_t>(shards));
  const Philox rng(mc.seed);

  auto run_shard = [&](int s) {
    const std::int64_t begin = n * s / shards;
    const std::int64_t end = n * (s + 1) / shards;
    ShardAccumulator& a = acc[static_cast<std::size_t>(s)];
    double u[8];
    for (std::int64_t k = begin; k < end; ++k) {
      rng.uniforms(static_cast<std::uint64_t>(k), dim, u);
      bool ok = true;
      double w = 0.0;
      switch (process) {
        case Process::TC: w = tc_sample_weight(ctx, u, &ok); break;
        case Process::DC: w = dc_sample_weight(ctx, u, &ok); break;
        case Process::SC: w = sc_sample_weight(ctx, u, &ok); break;
      }
      if (!ok) ++a.flagged;
      a.w.add(w);
      a.w2.add(w * w);
    }
  };

  const int workers = std::max(1, std::min(mc.threads, shards));
  if (workers == 1) {
    for (int s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int s = next.fetch_add(1); s < shards; s = next.fetch_add(1)) run_shard(s);
      });
    }
    for (auto& th : pool) th.join();
  }

  // ordered reduction keeps the total independent of the worker schedule
  DoubleDouble sw, sw2;
  std::int64_t flagged = 0;
  for (const ShardAccumulator& a : acc) {
    sw.add(a.w);
    sw2.add(a.w2);
    flagged += a.flagged;
  }

  IntegralEstimate est;
  est.samples = n;
  est.shards = shards;
  est.flagged = flagged;
  est.seed = mc.seed;
  if (n > 0) {
    const double mean = sw.value() / static_cast<double>(n);
    est.value = mean;
    if (n > 1) {
      const double mean2 = sw2.value() / static_cast<double>(n);
      const double var = std::max(0.0, mean2 - mean * mean);
      est.stderror = std::sqrt(var / static_cast<double>(n - 1));
    }
  }
  return est;
}

}  // namespace mcompton
