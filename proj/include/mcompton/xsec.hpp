#ifndef MCOMPTON_XSEC_HPP
#define MCOMPTON_XSEC_HPP

#include "mcompton/amplitudes.hpp"
#include "mcompton/kinematics.hpp"

namespace mcompton {

/** Electron spin handling for a differential value. */
struct SpinChannel {
  bool averaged = true;  // (1/2) sum over r_i, sum over r_f
  int r_i = 1, r_f = 1;  // used when averaged == false

  static SpinChannel half_summed() { return SpinChannel{}; }
  static SpinChannel fixed(int ri, int rf) { return SpinChannel{false, ri, rf}; }
};

struct DifferentialPoint {
  double value = 0.0;       // barn MeV^-2 sr^-3 (TC), barn MeV^-1 sr^-2 (DC), barn sr^-1 (SC)
  double omega_last = 0.0;  // energy of the closure photon
  double e_f = 0.0;
  bool allowed = false;     // kinematically open (closure energy > 0, E_f >= m)
};

// Phase-space prefactor in barn units multiplying |N|^2; zero for a point
// that is not kinematically allowed.
double tc_prefactor(const TcKinematicPoint& pt);
double dc_prefactor(const DcKinematicPoint& pt);
double sc_prefactor(const ScKinematicPoint& pt);

// |N|^2 summed over every spin and polarization channel of a table
double channel_sum_all(const TcChannelTable& t);
double channel_sum_all(const DcChannelTable& t);
double channel_sum_all(const ScChannelTable& t);

// |N|^2 for one polarization channel under the given spin treatment
double spin_weight(const TcChannelTable& t, int l0, int l1, int l2, int l3,
                   const SpinChannel& spin);
double spin_weight(const DcChannelTable& t, int l0, int l1, int l2, const SpinChannel& spin);
double spin_weight(const ScChannelTable& t, int l0, int l1, const SpinChannel& spin);

/**
 * Polarization-resolved differential cross sections by direct amplitude
 * evaluation.  The incoming polarization label comes from the config; legs
 * carry the emitted labels.  Values are differential in the emitted photon
 * solid angles and all but the last photon energy, in barn-based units.
 */
DifferentialPoint dsigma_tc(const ScatterConfig& cfg, const PhotonLeg& leg1,
                            const PhotonLeg& leg2, const Direction& dir3, int lambda3,
                            const SpinChannel& spin);
DifferentialPoint dsigma_dc(const ScatterConfig& cfg, const PhotonLeg& leg1,
                            const Direction& dir2, int lambda2, const SpinChannel& spin);
DifferentialPoint dsigma_sc(const ScatterConfig& cfg, const Direction& dir1, int lambda1,
                            const SpinChannel& spin);

/**
 * Lab-frame TC differential evaluated in the electron rest frame and mapped
 * back with the exact angular/energy transformation.  Inputs are lab-frame
 * quantities; this is the numerically safe path at large gamma.
 */
DifferentialPoint dsigma_tc_lab_via_rest(const ScatterConfig& cfg_lab, const PhotonLeg& leg1,
                                         const PhotonLeg& leg2, const Direction& dir3,
                                         int lambda3, const SpinChannel& spin);

// Closed-form single Compton references at e_i = m (electron initially at
// rest).  Per-channel value carries the (eps1.eps0)^2 correlation term;
// the unpolarized value averages the incoming and sums the outgoing label.
double dsigma_sc_analytic(double omega0, const Direction& dir1, int lambda0, int lambda1);
double dsigma_sc_analytic_unpolarized(double omega0, double theta1);

// Total single Compton cross section at e_i = m (barn)
double sigma_sc_total(double omega0);

// Nonrelativistic power laws for the eps = omega0/50 threshold convention
double sigma_dc_nr(double omega0);
double sigma_tc_nr(double omega0);

// Extreme relativistic soft-photon estimate with n extra photons resolved
// between eps_low and eps_up = ratio * eps_low (barn)
double sigma_er(double omega0, int n_extra, double ratio);
double sigma_sc_er(double omega0);

/** log10 of a differential value, masked where the value vanishes. */
struct MaskedValue {
  double value = 0.0;
  bool masked = true;
};

// S: log10 of the spin-half-summed TC differential for the configured
// polarization channel, masked below threshold or outside phase space.
// S-bar additionally sums all sixteen polarization channels.
MaskedValue s_value(const ScatterConfig& cfg, const PhotonLeg& leg1, const PhotonLeg& leg2,
                    const Direction& dir3, int lambda3);
MaskedValue s_bar_value(const ScatterConfig& cfg, const PhotonLeg& leg1, const PhotonLeg& leg2,
                        const Direction& dir3);

}  // namespace mcompton

#endif
