#ifndef MCOMPTON_CONSTANTS_HPP
#define MCOMPTON_CONSTANTS_HPP

namespace mcompton {

// Natural units: hbar = c = 1, energies in MeV, cross sections internally in
// MeV^-2 and converted to barn only at output boundaries.
namespace constants {

inline constexpr double electron_mass_mev = 0.51099895;
inline constexpr double alpha = 1.0 / 137.036;

// 1 MeV^-2 = 389.4 b (kept to four significant figures on purpose; every
// barn-valued result in this code goes through this one constant)
inline constexpr double barn_per_mev2 = 389.4;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace constants

}  // namespace mcompton

#endif
