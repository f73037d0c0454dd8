#ifndef MCOMPTON_SCENARIO_HPP
#define MCOMPTON_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcompton/entanglement.hpp"
#include "mcompton/kinematics.hpp"

namespace mcompton {

/**
 * Batch tasks, one per output style:
 *   grid-S / grid-Sbar   log10 differential over an (omega1, omega2) grid
 *   grid-tau-Q           entanglement measure and entropy over the same grid
 *   angular-sweep        per-channel energy-integrated values vs polar angle
 *   total-vs-omega0      MC totals with analytic reference columns
 *   single-point         everything at one kinematic point, JSON
 */
enum class Task { GridS, GridSbar, GridTauQ, AngularSweep, TotalVsOmega0, SinglePoint };

const char* task_name(Task t);

struct GridSpec {
  int n1 = 15, n2 = 15;
  double omega1_min = 0.0, omega1_max = 0.0;  // MeV
  double omega2_min = 0.0, omega2_max = 0.0;
  bool log_scale = false;
};

struct SweepSpec {
  int n_theta = 24;
  double theta_min = 0.0, theta_max = 0.0;
};

struct TotalsSpec {
  std::vector<double> omega0_values;  // MeV
  double eps_divisor = 50.0;          // infrared cut = omega0 / eps_divisor
  bool run_sc = true, run_dc = true, run_tc = true;
};

struct PointSpec {
  double omega1 = 0.0, omega2 = 0.0;  // MeV
};

struct McSpec {
  std::uint64_t seed = 1;
  std::int64_t samples = 10000;
  int shards = 64;
};

/**
 * One parsed scenario document (schema "mcompton/1").  Energies are stored in
 * MeV; the parser accepts bare numbers (MeV) or strings with an eV, keV, MeV,
 * or GeV suffix.  Unknown keys anywhere are a validation error.
 */
struct Scenario {
  std::string name;
  Task task = Task::SinglePoint;

  double omega0 = 0.0;  // MeV
  double e_i = 0.0;     // MeV, total electron energy
  double eps = 0.0;     // MeV, detector infrared threshold (lab frame)
  int lambda0 = 1;

  std::array<double, 3> theta{};
  std::array<double, 3> phi{};
  std::array<int, 3> lambda{1, 1, 1};

  GridSpec grid;
  SweepSpec sweep;
  TotalsSpec totals;
  PointSpec point;
  McSpec mc;

  // analyze a given polarization state instead of computing one
  std::optional<Matrix8> density_matrix;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);  // throws IoError / ValidationError

/** "0.18 MeV", "3.6 keV", "2.5 eV", "50 GeV", or a bare number in MeV. */
double parse_energy_mev(const std::string& text);

ScatterConfig scenario_config(const Scenario& sc);

}  // namespace mcompton

#endif
