#ifndef MCOMPTON_KINEMATICS_HPP
#define MCOMPTON_KINEMATICS_HPP

#include <array>
#include <utility>

#include "mcompton/fourvector.hpp"

namespace mcompton {

struct Direction {
  double theta = 0.0;  // polar angle from +z, radians
  double phi = 0.0;    // azimuth, radians
};

/** One emitted photon: energy, direction, linear polarization label (1|2). */
struct PhotonLeg {
  double omega = 0.0;
  Direction dir;
  int lambda = 1;
};

/**
 * Head-on collision setup.  The incoming photon travels along +z with energy
 * omega0; the electron travels along -z with total energy e_i >= m (e_i == m
 * is the rest frame).  eps is the infrared threshold every emitted photon
 * must exceed, in the same frame the config is written in.
 */
struct ScatterConfig {
  double omega0 = 0.0;
  double e_i = 0.0;
  double eps = 0.0;
  int lambda0 = 1;  // incoming polarization label
};

// throws ValidationError unless omega0 > 0, e_i >= m, 0 < eps < omega0 + e_i - m
void validate_config(const ScatterConfig& cfg);

FourVector photon_four_vector(double omega, const Direction& dir);
FourVector incoming_photon(const ScatterConfig& cfg);
FourVector incoming_electron(const ScatterConfig& cfg);

// lightlike direction vector (1, n_hat)
FourVector null_direction(const Direction& dir);

/**
 * Linear polarization basis transverse to a photon direction:
 *   eps1 = (0, cos(theta)cos(phi), cos(theta)sin(phi), -sin(theta))
 *   eps2 = (0, -sin(phi), cos(phi), 0)
 * Both are spacelike unit vectors orthogonal to the photon momentum.
 */
std::pair<FourVector, FourVector> polarization_basis(const Direction& dir);
FourVector polarization_vector(const Direction& dir, int lambda);

/**
 * Energy of the last emitted photon fixed by four-momentum closure, given the
 * first n-1 emitted photons and the direction of the last one.  k1/k2 may
 * carry zero energy, which reduces the process order.  Throws KinematicsError
 * when the defining denominator degenerates.
 */
double solve_omega3(const FourVector& p_i, const FourVector& k0, const FourVector& k1,
                    const FourVector& k2, const Direction& dir3);
double solve_omega2_dc(const FourVector& p_i, const FourVector& k0, const FourVector& k1,
                       const Direction& dir2);
double solve_omega1_sc(const FourVector& p_i, const FourVector& k0, const Direction& dir1);

FourVector final_electron(const FourVector& p_i, const FourVector& k0,
                          const FourVector& emitted_sum);

// d(E_f + omega_last)/d(omega_last) at fixed directions; the inverse of this
// appears in every differential cross section
double energy_jacobian(const FourVector& p_f, const Direction& dir_last);

/**
 * Largest omega_j compatible with the dependent (closure) photon staying at
 * energy eps_dep.  P = p_i + k0, K = sum of the other emitted photons held
 * fixed (zero four-vector for DC).  Returns 0 when the region is empty;
 * throws KinematicsError on a degenerate denominator.
 */
double omega_boundary(const FourVector& P, const FourVector& K, const Direction& dir_j,
                      const Direction& dir_dep, double eps_dep);

/** Fully assembled kinematic point for one TC evaluation. */
struct TcKinematicPoint {
  FourVector p_i, k0, k1, k2, k3, p_f;
  Direction dir1, dir2, dir3;
  double omega3 = 0.0;
  double jac = 0.0;      // d(E_f + omega3)/d omega3
  bool allowed = false;  // omega3 > 0 and E_f >= m
};

struct DcKinematicPoint {
  FourVector p_i, k0, k1, k2, p_f;
  Direction dir1, dir2;
  double omega2 = 0.0;
  double jac = 0.0;
  bool allowed = false;
};

struct ScKinematicPoint {
  FourVector p_i, k0, k1, p_f;
  Direction dir1;
  double omega1 = 0.0;
  double jac = 0.0;
  bool allowed = false;
};

// Non-throwing assembly: degenerate or unphysical points come back with
// allowed=false instead of an exception, so samplers can treat them as
// measure-zero and move on.
TcKinematicPoint build_tc_point(const ScatterConfig& cfg, const PhotonLeg& leg1,
                                const PhotonLeg& leg2, const Direction& dir3);
DcKinematicPoint build_dc_point(const ScatterConfig& cfg, const PhotonLeg& leg1,
                                const Direction& dir2);
ScKinematicPoint build_sc_point(const ScatterConfig& cfg, const Direction& dir1);

/**
 * Boost along z between the lab and the electron rest frame (the electron
 * moves along -z in the lab, so the rest frame recedes at -beta z_hat).
 *
 * All angle-dependent factors are evaluated in cancellation-free form: at
 * gamma ~ 1e5 the combinations 1 -+ beta*cos(theta) lose every significant
 * digit if computed literally, so they are built from one_minus_beta and
 * half-angle squares instead.  Azimuth is unchanged by the boost.
 */
struct ZBoost {
  double beta = 0.0;
  double gamma = 1.0;
  double one_minus_beta = 1.0;  // m^2 / (E (E + |p|)), kept exactly

  // 1 - beta*cos(theta_rest), stable for theta_rest near 0
  double doppler_rest(double theta_rest) const {
    const double s = std::sin(0.5 * theta_rest);
    return one_minus_beta + beta * 2.0 * s * s;
  }
  // 1 + beta*cos(theta_lab), stable for theta_lab near pi
  double codoppler_lab(double theta_lab) const {
    const double c = std::cos(0.5 * theta_lab);
    return one_minus_beta + beta * 2.0 * c * c;
  }

  Direction to_rest(const Direction& lab) const {
    const double d = codoppler_lab(lab.theta);
    const double c = std::cos(0.5 * lab.theta);
    const double cosr = (2.0 * c * c - one_minus_beta) / d;  // (cos+beta)/(1+beta cos)
    const double sinr = std::sin(lab.theta) * std::sqrt(one_minus_beta * (1.0 + beta)) / d;
    return {std::atan2(sinr, cosr), lab.phi};
  }
  Direction to_lab(const Direction& rest) const {
    // cos' - beta = (1 - 2 sin^2(theta'/2)) - (1 - one_minus_beta)
    const double d = doppler_rest(rest.theta);
    const double s = std::sin(0.5 * rest.theta);
    const double cosl = (one_minus_beta - 2.0 * s * s) / d;
    const double sinl = std::sin(rest.theta) * std::sqrt(one_minus_beta * (1.0 + beta)) / d;
    return {std::atan2(sinl, cosl), rest.phi};
  }

  double omega_to_rest(double omega_lab, double theta_lab) const {
    return gamma * codoppler_lab(theta_lab) * omega_lab;
  }
  double omega_to_lab(double omega_rest, double theta_rest) const {
    return gamma * doppler_rest(theta_rest) * omega_rest;
  }

  FourVector vec_to_rest(const FourVector& v) const {
    return {gamma * (v.t + beta * v.z), v.x, v.y, gamma * (v.z + beta * v.t)};
  }
  FourVector vec_to_lab(const FourVector& v) const {
    return {gamma * (v.t - beta * v.z), v.x, v.y, gamma * (v.z - beta * v.t)};
  }
};

ZBoost rest_frame_boost(double e_i);

// config as seen from the electron rest frame; eps keeps its lab meaning and
// must be enforced through lab_threshold_pass when integrating there
ScatterConfig rest_config(const ScatterConfig& cfg);

// strict lab-frame infrared cut on a rest-frame photon
bool lab_threshold_pass(const ZBoost& b, double omega_rest, double theta_rest, double eps_lab);

// d^8 sigma transformation factor between rest-frame and lab-frame TC
// differentials at fixed rest angles (theta'_1, theta'_2, theta'_3)
double cross_section_jacobian(const ZBoost& b, double th1, double th2, double th3);

// same for the energy-integrated angular differential d^6 sigma
double angular_jacobian(const ZBoost& b, double th1, double th2, double th3);

}  // namespace mcompton

#endif
