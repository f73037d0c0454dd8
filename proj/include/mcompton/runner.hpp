#ifndef MCOMPTON_RUNNER_HPP
#define MCOMPTON_RUNNER_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "mcompton/quadrature.hpp"
#include "mcompton/scenario.hpp"

namespace mcompton {

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  std::optional<std::string> format;  // "csv" or "json"; default depends on the task
  int threads = 1;
  bool allow_flagged = false;
};

struct RunReport {
  int exit_code = 0;         // 0 clean, 2 numerical flags without --allow-flagged
  std::int64_t flagged = 0;  // flagged samples plus unconverged quadratures/solves
};

RunReport run_scenario_to_stream(const Scenario& sc, const RunOverrides& ov, std::ostream& out);

/** Empty output path writes to stdout.  Throws IoError on write failure. */
RunReport run_scenario(const Scenario& sc, const RunOverrides& ov,
                       const std::string& output_path);

/**
 * Per-channel energy-integrated differential cross sections at one common
 * polar angle (every leg at theta, azimuths as given).  Lab-frame configs are
 * evaluated in the electron rest frame and mapped back through the exact
 * per-leg solid-angle factors; thresholds always mean lab-frame energies.
 * Channel indices are bit-packed polarization labels, most significant label
 * first: sc[(l0-1)*2+(l1-1)], dc[(l0-1)*4+(l1-1)*2+(l2-1)], and
 * tc[(l0-1)*8+(l1-1)*4+(l2-1)*2+(l3-1)].
 */
struct SweepPoint {
  double theta = 0.0;                  // lab polar angle
  double gamma_pi_minus_theta = 0.0;   // backscattering axis gamma_i * (pi - theta)
  std::array<double, 4> sc{};          // barn / sr
  std::array<double, 8> dc{};          // barn / sr^2
  std::array<double, 16> tc{};         // barn / sr^3
  bool dc_converged = true;
  bool tc_converged = true;
};

SweepPoint sweep_point(const ScatterConfig& cfg, const std::array<double, 3>& phi,
                       double theta, const RombergOptions& opt);

}  // namespace mcompton

#endif
