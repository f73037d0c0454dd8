#ifndef MCOMPTON_AMPLITUDES_HPP
#define MCOMPTON_AMPLITUDES_HPP

#include <array>
#include <vector>

#include "mcompton/dirac.hpp"
#include "mcompton/fourvector.hpp"
#include "mcompton/kinematics.hpp"

namespace mcompton {

// Vertex orderings (photon index per vertex, counted from the incoming
// spinor end).  Photon 0 is absorbed, the others are emitted.  The list is
// enumerated lexicographically exactly once; amplitude sums always run in
// this order so results are bit-stable.
const std::vector<std::array<int, 2>>& sc_orderings();
const std::vector<std::array<int, 3>>& dc_orderings();
const std::vector<std::array<int, 4>>& tc_orderings();

/**
 * Fermion line momentum after the first `count` vertices of an ordering:
 * q = p_i + sum sgn(j) k_j over the attached photons, with sgn = +1 for the
 * absorbed photon and -1 for emitted ones.
 */
template <std::size_t N>
FourVector propagator_momentum(const FourVector& p_i, const std::array<FourVector, N>& k,
                               const std::array<int, N>& ordering, int count) {
  FourVector q = p_i;
  for (int t = 0; t < count; ++t) {
    const int j = ordering[static_cast<std::size_t>(t)];
    if (j == 0)
      q += k[0];
    else
      q -= k[static_cast<std::size_t>(j)];
  }
  return q;
}

// Single-channel reduced amplitudes: sum over vertex orderings of the
// spinor chain ubar eps-slash (prop) ... eps-slash u, scaled by m^(n-1) for
// n photons.  Polarizations are passed explicitly (complex, so gauge-shifted
// vectors can be fed in); throws KinematicsError if a propagator denominator
// vanishes.
cplx n_sc(const FourVector& p_i, int r_i, const FourVector& p_f, int r_f,
          const std::array<FourVector, 2>& k, const std::array<ComplexFourVector, 2>& eps);
cplx n_dc(const FourVector& p_i, int r_i, const FourVector& p_f, int r_f,
          const std::array<FourVector, 3>& k, const std::array<ComplexFourVector, 3>& eps);
cplx n_tc(const FourVector& p_i, int r_i, const FourVector& p_f, int r_f,
          const std::array<FourVector, 4>& k, const std::array<ComplexFourVector, 4>& eps);

/**
 * Reduced amplitudes for every spin and linear-polarization channel at one
 * kinematic point, sharing propagator matrices and partial spinor chains
 * across channels.  Flat index layout:
 *   ((r_i_bit*2 + r_f_bit) << n_photons) | polarization bits,
 * with photon 0's bit most significant among the polarization bits.
 */
struct ScChannelTable {
  std::array<cplx, 16> n{};
  const cplx& at(int r_i, int r_f, int l0, int l1) const {
    return n[static_cast<std::size_t>((((r_i - 1) * 2 + (r_f - 1)) << 2) |
                                      ((l0 - 1) << 1) | (l1 - 1))];
  }
};

struct DcChannelTable {
  std::array<cplx, 32> n{};
  const cplx& at(int r_i, int r_f, int l0, int l1, int l2) const {
    return n[static_cast<std::size_t>((((r_i - 1) * 2 + (r_f - 1)) << 3) |
                                      ((l0 - 1) << 2) | ((l1 - 1) << 1) | (l2 - 1))];
  }
};

struct TcChannelTable {
  std::array<cplx, 64> n{};
  const cplx& at(int r_i, int r_f, int l0, int l1, int l2, int l3) const {
    return n[static_cast<std::size_t>((((r_i - 1) * 2 + (r_f - 1)) << 4) |
                                      ((l0 - 1) << 3) | ((l1 - 1) << 2) |
                                      ((l2 - 1) << 1) | (l3 - 1))];
  }
};

ScChannelTable sc_channel_table(const ScKinematicPoint& pt);
DcChannelTable dc_channel_table(const DcKinematicPoint& pt);
TcChannelTable tc_channel_table(const TcKinematicPoint& pt);

}  // namespace mcompton

#endif
