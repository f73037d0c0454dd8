#include "mcompton/xsec.hpp"

#include <cmath>

#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"

namespace mcompton {

namespace {

constexpr double kMass = constants::electron_mass_mev;
constexpr double kAlpha = constants::alpha;
constexpr double kBarn = constants::barn_per_mev2;
constexpr double kPi = constants::pi;
constexpr double kTwoPi2 = (2.0 * kPi) * (2.0 * kPi);
constexpr double kTwoPi4 = kTwoPi2 * kTwoPi2;

double abs2(cplx z) { return std::norm(z); }

}  // namespace

double tc_prefactor(const TcKinematicPoint& pt) {
  if (!pt.allowed || !(std::abs(pt.jac) > 0.0)) return 0.0;
  const double flux = minkowski_dot(pt.p_i, pt.k0);
  const double m4 = kMass * kMass * kMass * kMass;
  return kAlpha * kAlpha * kAlpha * kAlpha / kTwoPi4 / m4 * pt.k1.t * pt.k2.t * pt.k3.t /
         (pt.p_f.t * flux) / std::abs(pt.jac) * kBarn;
}

double dc_prefactor(const DcKinematicPoint& pt) {
  if (!pt.allowed || !(std::abs(pt.jac) > 0.0)) return 0.0;
  const double flux = minkowski_dot(pt.p_i, pt.k0);
  return kAlpha * kAlpha * kAlpha / kTwoPi2 / (kMass * kMass) * pt.k1.t * pt.k2.t /
         (pt.p_f.t * flux) / std::abs(pt.jac) * kBarn;
}

double sc_prefactor(const ScKinematicPoint& pt) {
  if (!pt.allowed || !(std::abs(pt.jac) > 0.0)) return 0.0;
  const double flux = minkowski_dot(pt.p_i, pt.k0);
  return kAlpha * kAlpha * pt.k1.t / (pt.p_f.t * flux) / std::abs(pt.jac) * kBarn;
}

double channel_sum_all(const TcChannelTable& t) {
  double s = 0.0;
  for (const cplx& z : t.n) s += abs2(z);
  return s;
}
double channel_sum_all(const DcChannelTable& t) {
  double s = 0.0;
  for (const cplx& z : t.n) s += abs2(z);
  return s;
}
double channel_sum_all(const ScChannelTable& t) {
  double s = 0.0;
  for (const cplx& z : t.n) s += abs2(z);
  return s;
}

double spin_weight(const TcChannelTable& t, int l0, int l1, int l2, int l3,
                   const SpinChannel& spin) {
  if (!spin.averaged) return abs2(t.at(spin.r_i, spin.r_f, l0, l1, l2, l3));
  double s = 0.0;
  for (int ri = 1; ri <= 2; ++ri)
    for (int rf = 1; rf <= 2; ++rf) s += abs2(t.at(ri, rf, l0, l1, l2, l3));
  return 0.5 * s;
}

double spin_weight(const DcChannelTable& t, int l0, int l1, int l2, const SpinChannel& spin) {
  if (!spin.averaged) return abs2(t.at(spin.r_i, spin.r_f, l0, l1, l2));
  double s = 0.0;
  for (int ri = 1; ri <= 2; ++ri)
    for (int rf = 1; rf <= 2; ++rf) s += abs2(t.at(ri, rf, l0, l1, l2));
  return 0.5 * s;
}

double spin_weight(const ScChannelTable& t, int l0, int l1, const SpinChannel& spin) {
  if (!spin.averaged) return abs2(t.at(spin.r_i, spin.r_f, l0, l1));
  double s = 0.0;
  for (int ri = 1; ri <= 2; ++ri)
    for (int rf = 1; rf <= 2; ++rf) s += abs2(t.at(ri, rf, l0, l1));
  return 0.5 * s;
}

namespace {

// One TC evaluation shared by the channel-resolved and channel-summed entry
// points.  For a boosted config the amplitude work happens in the electron
// rest frame and `scale` folds in the inverse angular/energy Jacobian, so
// value = scale * prefactor * |N|^2-combination, with omega3/e_f reported in
// the config's own frame.
struct TcEval {
  TcChannelTable table;
  double scaled_prefactor = 0.0;
  double omega3_out = 0.0;
  double ef_out = 0.0;
  bool allowed = false;
  bool have_table = false;
};

TcEval eval_tc(const ScatterConfig& cfg, const PhotonLeg& leg1, const PhotonLeg& leg2,
               const Direction& dir3) {
  TcEval ev;
  if (cfg.e_i > kMass) {
    const ZBoost b = rest_frame_boost(cfg.e_i);
    const ScatterConfig rcfg = rest_config(cfg);
    PhotonLeg r1 = leg1, r2 = leg2;
    r1.dir = b.to_rest(leg1.dir);
    r1.omega = b.omega_to_rest(leg1.omega, leg1.dir.theta);
    r2.dir = b.to_rest(leg2.dir);
    r2.omega = b.omega_to_rest(leg2.omega, leg2.dir.theta);
    const Direction r3 = b.to_rest(dir3);
    const TcKinematicPoint pt = build_tc_point(rcfg, r1, r2, r3);
    ev.allowed = pt.allowed;
    ev.omega3_out = b.omega_to_lab(pt.omega3, r3.theta);
    ev.ef_out = cfg.e_i + cfg.omega0 - leg1.omega - leg2.omega - ev.omega3_out;
    if (!pt.allowed) return ev;
    const double pref = tc_prefactor(pt);
    const double jac = cross_section_jacobian(b, r1.dir.theta, r2.dir.theta, r3.theta);
    if (pref == 0.0 || !(jac > 0.0)) {
      ev.allowed = false;
      return ev;
    }
    ev.scaled_prefactor = pref / jac;
    ev.table = tc_channel_table(pt);
    ev.have_table = true;
    return ev;
  }
  const TcKinematicPoint pt = build_tc_point(cfg, leg1, leg2, dir3);
  ev.allowed = pt.allowed;
  ev.omega3_out = pt.omega3;
  ev.ef_out = pt.p_f.t;
  if (!pt.allowed) return ev;
  const double pref = tc_prefactor(pt);
  if (pref == 0.0) {
    ev.allowed = false;
    return ev;
  }
  ev.scaled_prefactor = pref;
  ev.table = tc_channel_table(pt);
  ev.have_table = true;
  return ev;
}

}  // namespace

DifferentialPoint dsigma_tc(const ScatterConfig& cfg, const PhotonLeg& leg1,
                            const PhotonLeg& leg2, const Direction& dir3, int lambda3,
                            const SpinChannel& spin) {
  const TcKinematicPoint pt = build_tc_point(cfg, leg1, leg2, dir3);
  DifferentialPoint out;
  out.omega_last = pt.omega3;
  out.e_f = pt.p_f.t;
  out.allowed = pt.allowed;
  if (!pt.allowed) return out;
  const double pref = tc_prefactor(pt);
  if (pref == 0.0) {
    out.allowed = false;
    return out;
  }
  const TcChannelTable table = tc_channel_table(pt);
  out.value = pref * spin_weight(table, cfg.lambda0, leg1.lambda, leg2.lambda, lambda3, spin);
  return out;
}

DifferentialPoint dsigma_dc(const ScatterConfig& cfg, const PhotonLeg& leg1,
                            const Direction& dir2, int lambda2, const SpinChannel& spin) {
  const DcKinematicPoint pt = build_dc_point(cfg, leg1, dir2);
  DifferentialPoint out;
  out.omega_last = pt.omega2;
  out.e_f = pt.p_f.t;
  out.allowed = pt.allowed;
  if (!pt.allowed) return out;
  const double pref = dc_prefactor(pt);
  if (pref == 0.0) {
    out.allowed = false;
    return out;
  }
  const DcChannelTable table = dc_channel_table(pt);
  out.value = pref * spin_weight(table, cfg.lambda0, leg1.lambda, lambda2, spin);
  return out;
}

DifferentialPoint dsigma_sc(const ScatterConfig& cfg, const Direction& dir1, int lambda1,
                            const SpinChannel& spin) {
  const ScKinematicPoint pt = build_sc_point(cfg, dir1);
  DifferentialPoint out;
  out.omega_last = pt.omega1;
  out.e_f = pt.p_f.t;
  out.allowed = pt.allowed;
  if (!pt.allowed) return out;
  const double pref = sc_prefactor(pt);
  if (pref == 0.0) {
    out.allowed = false;
    return out;
  }
  const ScChannelTable table = sc_channel_table(pt);
  out.value = pref * spin_weight(table, cfg.lambda0, lambda1, spin);
  return out;
}

DifferentialPoint dsigma_tc_lab_via_rest(const ScatterConfig& cfg_lab, const PhotonLeg& leg1,
                                         const PhotonLeg& leg2, const Direction& dir3,
                                         int lambda3, const SpinChannel& spin) {
  const TcEval ev = eval_tc(cfg_lab, leg1, leg2, dir3);
  DifferentialPoint out;
  out.allowed = ev.allowed;
  out.omega_last = ev.omega3_out;
  out.e_f = ev.ef_out;
  if (!ev.have_table) return out;
  out.value = ev.scaled_prefactor *
              spin_weight(ev.table, cfg_lab.lambda0, leg1.lambda, leg2.lambda, lambda3, spin);
  return out;
}

double dsigma_sc_analytic(double omega0, const Direction& dir1, int lambda0, int lambda1) {
  const double ct = std::cos(dir1.theta);
  const double w1 = omega0 / (1.0 + omega0 / kMass * (1.0 - ct));
  const FourVector e0 = lambda0 == 1 ? FourVector{0.0, 1.0, 0.0, 0.0}
                                     : FourVector{0.0, 0.0, 1.0, 0.0};
  const FourVector e1 = polarization_vector(dir1, lambda1);
  const double d = e0.x * e1.x + e0.y * e1.y + e0.z * e1.z;
  const double ratio = w1 / omega0;
  const double bracket = ratio + 1.0 / ratio - 2.0 + 4.0 * d * d;
  return 0.25 * kAlpha * kAlpha / (kMass * kMass) * ratio * ratio * bracket * kBarn;
}

double dsigma_sc_analytic_unpolarized(double omega0, double theta1) {
  const double ct = std::cos(theta1);
  const double w1 = omega0 / (1.0 + omega0 / kMass * (1.0 - ct));
  const double ratio = w1 / omega0;
  const double st2 = 1.0 - ct * ct;
  return 0.5 * kAlpha * kAlpha / (kMass * kMass) * ratio * ratio *
         (ratio + 1.0 / ratio - st2) * kBarn;
}

double sigma_sc_total(double omega0) {
  const double w = omega0 / kMass;
  const double thomson = 8.0 * kPi / 3.0 * kAlpha * kAlpha / (kMass * kMass) * kBarn;
  if (w < 1e-4) {
    // low-energy series; the closed form cancels to O(w^3) and loses digits
    return thomson * (1.0 - 2.0 * w + 5.2 * w * w - 13.3 * w * w * w);
  }
  const double l = std::log1p(2.0 * w);
  const double f = (1.0 + w) / (w * w * w) * (2.0 * w * (1.0 + w) / (1.0 + 2.0 * w) - l) +
                   l / (2.0 * w) - (1.0 + 3.0 * w) / ((1.0 + 2.0 * w) * (1.0 + 2.0 * w));
  return 2.0 * kPi * kAlpha * kAlpha / (kMass * kMass) * f * kBarn;
}

double sigma_dc_nr(double omega0) {
  const double w = omega0 / kMass;
  return 9.1 * kAlpha * kAlpha * kAlpha / (kMass * kMass) * w * w * kBarn;
}

double sigma_tc_nr(double omega0) {
  const double w = omega0 / kMass;
  return 4.5 * kAlpha * kAlpha * kAlpha * kAlpha / (kMass * kMass) * w * w * w * w * kBarn;
}

double sigma_er(double omega0, int n_extra, double ratio) {
  double nfact = 1.0;
  for (int i = 2; i <= n_extra; ++i) nfact *= i;
  const double per_photon = kAlpha / kPi * std::log(2.0 * omega0 / kMass) * std::log(ratio);
  double factor = 1.0;
  for (int i = 0; i < n_extra; ++i) factor *= per_photon;
  return factor / nfact * sigma_sc_total(omega0);
}

double sigma_sc_er(double omega0) {
  return kPi * kAlpha * kAlpha / (kMass * omega0) * std::log(2.0 * omega0 / kMass) * kBarn;
}

namespace {

MaskedValue masked_log10(const TcEval& ev, const ScatterConfig& cfg, const PhotonLeg& leg1,
                         const PhotonLeg& leg2, double value) {
  MaskedValue out;
  // inclusive cut: a photon at exactly the detection threshold counts
  if (!ev.allowed || !(ev.omega3_out >= cfg.eps) || !(leg1.omega >= cfg.eps) ||
      !(leg2.omega >= cfg.eps) || !(value > 0.0))
    return out;
  out.value = std::log10(value);
  out.masked = false;
  return out;
}

}  // namespace

MaskedValue s_value(const ScatterConfig& cfg, const PhotonLeg& leg1, const PhotonLeg& leg2,
                    const Direction& dir3, int lambda3) {
  const TcEval ev = eval_tc(cfg, leg1, leg2, dir3);
  double v = 0.0;
  if (ev.have_table)
    v = ev.scaled_prefactor * spin_weight(ev.table, cfg.lambda0, leg1.lambda, leg2.lambda,
                                          lambda3, SpinChannel::half_summed());
  return masked_log10(ev, cfg, leg1, leg2, v);
}

MaskedValue s_bar_value(const ScatterConfig& cfg, const PhotonLeg& leg1, const PhotonLeg& leg2,
                        const Direction& dir3) {
  const TcEval ev = eval_tc(cfg, leg1, leg2, dir3);
  double v = 0.0;
  if (ev.have_table) v = ev.scaled_prefactor * 0.5 * channel_sum_all(ev.table);
  return masked_log10(ev, cfg, leg1, leg2, v);
}

}  // namespace mcompton
