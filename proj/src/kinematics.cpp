#include "mcompton/kinematics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"

namespace mcompton {

namespace {

constexpr double kMass = constants::electron_mass_mev;

// relative scale below which a closure denominator counts as degenerate
constexpr double kDegenerate = 1e-12;

double closure_ratio(double num, double den, double scale) {
  if (std::abs(den) < kDegenerate * scale) {
    std::ostringstream msg;
    msg << "degenerate closure denominator " << den << " at scale " << scale;
    throw KinematicsError(msg.str());
  }
  return num / den;
}

}  // namespace

void validate_config(const ScatterConfig& cfg) {
  if (!(cfg.omega0 > 0.0)) throw ValidationError("omega0 must be positive");
  if (!(cfg.e_i >= kMass)) throw ValidationError("e_i must be at least the electron mass");
  const double budget = cfg.omega0 + cfg.e_i - kMass;
  if (!(cfg.eps > 0.0 && cfg.eps < budget))
    throw ValidationError("eps must lie strictly between 0 and omega0 + e_i - m");
  if (cfg.lambda0 != 1 && cfg.lambda0 != 2)
    throw ValidationError("lambda0 must be 1 or 2");
}

FourVector photon_four_vector(double omega, const Direction& dir) {
  const double st = std::sin(dir.theta);
  return {omega, omega * st * std::cos(dir.phi), omega * st * std::sin(dir.phi),
          omega * std::cos(dir.theta)};
}

FourVector incoming_photon(const ScatterConfig& cfg) {
  return {cfg.omega0, 0.0, 0.0, cfg.omega0};
}

FourVector incoming_electron(const ScatterConfig& cfg) {
  const double pz = std::sqrt(std::max(0.0, cfg.e_i * cfg.e_i - kMass * kMass));
  return {cfg.e_i, 0.0, 0.0, -pz};
}

FourVector null_direction(const Direction& dir) {
  const double st = std::sin(dir.theta);
  return {1.0, st * std::cos(dir.phi), st * std::sin(dir.phi), std::cos(dir.theta)};
}

std::pair<FourVector, FourVector> polarization_basis(const Direction& dir) {
  const double st = std::sin(dir.theta), ct = std::cos(dir.theta);
  const double sp = std::sin(dir.phi), cp = std::cos(dir.phi);
  FourVector eps1{0.0, ct * cp, ct * sp, -st};
  FourVector eps2{0.0, -sp, cp, 0.0};
  return {eps1, eps2};
}

FourVector polarization_vector(const Direction& dir, int lambda) {
  if (lambda != 1 && lambda != 2) throw ValidationError("polarization label must be 1 or 2");
  auto [e1, e2] = polarization_basis(dir);
  return lambda == 1 ? e1 : e2;
}

double solve_omega3(const FourVector& p_i, const FourVector& k0, const FourVector& k1,
                    const FourVector& k2, const Direction& dir3) {
  const FourVector n3 = null_direction(dir3);
  const double num = minkowski_dot(p_i, k1 + k2 - k0) + minkowski_dot(k0, k1 + k2) -
                     minkowski_dot(k1, k2);
  const double den = minkowski_dot(n3, k1 + k2 - k0 - p_i);
  return closure_ratio(num, den, p_i.t + k0.t);
}

double solve_omega2_dc(const FourVector& p_i, const FourVector& k0, const FourVector& k1,
                       const Direction& dir2) {
  const FourVector n2 = null_direction(dir2);
  const double num = minkowski_dot(p_i, k1 - k0) + minkowski_dot(k0, k1);
  const double den = minkowski_dot(n2, k1 - p_i - k0);
  return closure_ratio(num, den, p_i.t + k0.t);
}

double solve_omega1_sc(const FourVector& p_i, const FourVector& k0, const Direction& dir1) {
  const FourVector n1 = null_direction(dir1);
  const double num = minkowski_dot(p_i, k0);
  const double den = minkowski_dot(n1, p_i + k0);
  return closure_ratio(num, den, p_i.t + k0.t);
}

FourVector final_electron(const FourVector& p_i, const FourVector& k0,
                          const FourVector& emitted_sum) {
  return p_i + k0 - emitted_sum;
}

double energy_jacobian(const FourVector& p_f, const Direction& dir_last) {
  // dE_f/dw = -(n_hat . p_f_spatial)/E_f at fixed directions, so
  // d(E_f + w)/dw = 1 - (n_hat . p_f_spatial)/E_f
  const FourVector n = null_direction(dir_last);
  const double n_dot_pf = n.x * p_f.x + n.y * p_f.y + n.z * p_f.z;
  return 1.0 - n_dot_pf / p_f.t;
}

double omega_boundary(const FourVector& P, const FourVector& K, const Direction& dir_j,
                      const Direction& dir_dep, double eps_dep) {
  const FourVector nj = null_direction(dir_j);
  const FourVector nd = null_direction(dir_dep);
  const double p_i_dot_k0 = 0.5 * (minkowski_norm2(P) - kMass * kMass);
  const double num = p_i_dot_k0 - minkowski_dot(P, K) -
                     eps_dep * minkowski_dot(P - K, nd);
  const double den = minkowski_dot(P - K - eps_dep * nd, nj);
  const double w = closure_ratio(num, den, P.t);
  return w > 0.0 ? w : 0.0;
}

namespace {

// shared tail: close the final photon, build p_f, evaluate the Jacobian
template <typename Point>
void close_point(Point& pt, const FourVector& emitted_before, const Direction& dir_last,
                 double omega_last, FourVector& k_last) {
  k_last = photon_four_vector(omega_last, dir_last);
  pt.p_f = pt.p_i + pt.k0 - emitted_before - k_last;
  const FourVector n = null_direction(dir_last);
  const double n_dot_pf = n.x * pt.p_f.x + n.y * pt.p_f.y + n.z * pt.p_f.z;
  pt.jac = 1.0 - n_dot_pf / pt.p_f.t;
  pt.allowed = std::isfinite(omega_last) && omega_last > 0.0 && pt.p_f.t >= kMass &&
               std::isfinite(pt.jac);
}

}  // namespace

TcKinematicPoint build_tc_point(const ScatterConfig& cfg, const PhotonLeg& leg1,
                                const PhotonLeg& leg2, const Direction& dir3) {
  TcKinematicPoint pt;
  pt.p_i = incoming_electron(cfg);
  pt.k0 = incoming_photon(cfg);
  pt.k1 = photon_four_vector(leg1.omega, leg1.dir);
  pt.k2 = photon_four_vector(leg2.omega, leg2.dir);
  pt.dir1 = leg1.dir;
  pt.dir2 = leg2.dir;
  pt.dir3 = dir3;
  const FourVector n3 = null_direction(dir3);
  const double num = minkowski_dot(pt.p_i, pt.k1 + pt.k2 - pt.k0) +
                     minkowski_dot(pt.k0, pt.k1 + pt.k2) - minkowski_dot(pt.k1, pt.k2);
  const double den = minkowski_dot(n3, pt.k1 + pt.k2 - pt.k0 - pt.p_i);
  pt.omega3 = den != 0.0 ? num / den : std::numeric_limits<double>::infinity();
  close_point(pt, pt.k1 + pt.k2, dir3, pt.omega3, pt.k3);
  return pt;
}

DcKinematicPoint build_dc_point(const ScatterConfig& cfg, const PhotonLeg& leg1,
                                const Direction& dir2) {
  DcKinematicPoint pt;
  pt.p_i = incoming_electron(cfg);
  pt.k0 = incoming_photon(cfg);
  pt.k1 = photon_four_vector(leg1.omega, leg1.dir);
  pt.dir1 = leg1.dir;
  pt.dir2 = dir2;
  const FourVector n2 = null_direction(dir2);
  const double num = minkowski_dot(pt.p_i, pt.k1 - pt.k0) + minkowski_dot(pt.k0, pt.k1);
  const double den = minkowski_dot(n2, pt.k1 - pt.p_i - pt.k0);
  pt.omega2 = den != 0.0 ? num / den : std::numeric_limits<double>::infinity();
  close_point(pt, pt.k1, dir2, pt.omega2, pt.k2);
  return pt;
}

ScKinematicPoint build_sc_point(const ScatterConfig& cfg, const Direction& dir1) {
  ScKinematicPoint pt;
  pt.p_i = incoming_electron(cfg);
  pt.k0 = incoming_photon(cfg);
  pt.dir1 = dir1;
  const FourVector n1 = null_direction(dir1);
  const double num = minkowski_dot(pt.p_i, pt.k0);
  const double den = minkowski_dot(n1, pt.p_i + pt.k0);
  pt.omega1 = den != 0.0 ? num / den : std::numeric_limits<double>::infinity();
  close_point(pt, FourVector{}, dir1, pt.omega1, pt.k1);
  return pt;
}

ZBoost rest_frame_boost(double e_i) {
  ZBoost b;
  b.gamma = e_i / kMass;
  const double pz = std::sqrt(std::max(0.0, e_i * e_i - kMass * kMass));
  b.beta = pz / e_i;
  // 1 - beta without subtractive cancellation
  b.one_minus_beta = kMass * kMass / (e_i * (e_i + pz));
  return b;
}

ScatterConfig rest_config(const ScatterConfig& cfg) {
  const ZBoost b = rest_frame_boost(cfg.e_i);
  ScatterConfig out = cfg;
  out.omega0 = b.gamma * (1.0 + b.beta) * cfg.omega0;
  out.e_i = kMass;
  return out;
}

bool lab_threshold_pass(const ZBoost& b, double omega_rest, double theta_rest, double eps_lab) {
  return b.omega_to_lab(omega_rest, theta_rest) > eps_lab;
}

double cross_section_jacobian(const ZBoost& b, double th1, double th2, double th3) {
  const double one_m_b2 = b.one_minus_beta * (1.0 + b.beta);
  const double d3 = b.doppler_rest(th3);
  return one_m_b2 * one_m_b2 / (b.doppler_rest(th1) * b.doppler_rest(th2) * d3 * d3);
}

double angular_jacobian(const ZBoost& b, double th1, double th2, double th3) {
  const double one_m_b2 = b.one_minus_beta * (1.0 + b.beta);
  const double d1 = b.doppler_rest(th1);
  const double d2 = b.doppler_rest(th2);
  const double d3 = b.doppler_rest(th3);
  return one_m_b2 * one_m_b2 * one_m_b2 / (d1 * d1 * d2 * d2 * d3 * d3);
}

}  // namespace mcompton
