#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"
#include "mcompton/runner.hpp"
#include "mcompton/scenario.hpp"

namespace {

using namespace mcompton;

struct GlobalArgs {
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  int threads = 1;
  std::string output;
  std::string format;
  bool allow_flagged = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* samples_opt = nullptr;
  CLI::Option* format_opt = nullptr;

  RunOverrides overrides() const {
    RunOverrides ov;
    if (seed_opt->count() > 0) ov.seed = seed;
    if (samples_opt->count() > 0) ov.samples = samples;
    if (format_opt->count() > 0) ov.format = format;
    ov.threads = threads;
    ov.allow_flagged = allow_flagged;
    return ov;
  }
};

double energy_arg(const std::string& text, const char* what) {
  try {
    return parse_energy_mev(text);
  } catch (const ValidationError&) {
    throw ValidationError(std::string(what) + ": cannot parse energy \"" + text + "\"");
  }
}

std::array<double, 3> spread3(const std::vector<double>& v, const char* what) {
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw ValidationError(std::string(what) + ": expected 1 or 3 values");
}

std::array<double, 3> mercedes_phi() {
  return {2.0 * constants::pi / 3.0, 4.0 * constants::pi / 3.0, 2.0 * constants::pi};
}

int run_command(const std::string& path, const GlobalArgs& g) {
  const Scenario sc = load_scenario(path);
  return run_scenario(sc, g.overrides(), g.output).exit_code;
}

int validate_command(const std::vector<std::string>& paths) {
  for (const std::string& path : paths) {
    const Scenario sc = load_scenario(path);
    std::cout << "OK " << path << ": " << sc.name << " (" << task_name(sc.task) << ")\n";
  }
  return 0;
}

struct TotalArgs {
  std::string omega0;
  std::string electron_energy = "0.51099895 MeV";
  std::string eps;
  double eps_divisor = 50.0;
  std::vector<std::string> processes{"sc", "dc", "tc"};
};

int total_command(const TotalArgs& a, const GlobalArgs& g) {
  Scenario sc;
  sc.name = "cli-total";
  sc.task = Task::TotalVsOmega0;
  sc.e_i = energy_arg(a.electron_energy, "--electron-energy");
  const double w0 = energy_arg(a.omega0, "--omega0");
  if (!(w0 > 0.0)) throw ValidationError("--omega0 must be positive");
  sc.totals.omega0_values = {w0};
  if (!a.eps.empty()) {
    const double eps = energy_arg(a.eps, "--eps");
    if (!(eps > 0.0) || !(eps < w0)) throw ValidationError("--eps must lie in (0, omega0)");
    sc.totals.eps_divisor = w0 / eps;
  } else {
    sc.totals.eps_divisor = a.eps_divisor;
  }
  sc.totals.run_sc = sc.totals.run_dc = sc.totals.run_tc = false;
  for (const std::string& p : a.processes) {
    if (p == "sc")
      sc.totals.run_sc = true;
    else if (p == "dc")
      sc.totals.run_dc = true;
    else if (p == "tc")
      sc.totals.run_tc = true;
    else
      throw ValidationError("--process: unknown process \"" + p + "\"");
  }
  return run_scenario(sc, g.overrides(), g.output).exit_code;
}

struct PointArgs {
  std::string omega0;
  std::string electron_energy = "0.51099895 MeV";
  std::string eps;
  std::string omega1;
  std::string omega2;
  std::vector<double> theta;
  std::vector<double> phi;
  int lambda0 = 1;
  std::vector<int> lambda{1, 1, 1};
};

int point_command(const PointArgs& a, const GlobalArgs& g) {
  Scenario sc;
  sc.name = "cli-point";
  sc.task = Task::SinglePoint;
  sc.omega0 = energy_arg(a.omega0, "--omega0");
  sc.e_i = energy_arg(a.electron_energy, "--electron-energy");
  sc.eps = a.eps.empty() ? sc.omega0 / 50.0 : energy_arg(a.eps, "--eps");
  sc.lambda0 = a.lambda0;
  sc.theta = spread3(a.theta, "--theta");
  sc.phi = a.phi.empty() ? mercedes_phi() : spread3(a.phi, "--phi");
  if (a.lambda.size() != 3) throw ValidationError("--lambda: expected 3 values");
  for (int i = 0; i < 3; ++i) {
    if (a.lambda[static_cast<std::size_t>(i)] != 1 && a.lambda[static_cast<std::size_t>(i)] != 2)
      throw ValidationError("--lambda: values must be 1 or 2");
    sc.lambda[static_cast<std::size_t>(i)] = a.lambda[static_cast<std::size_t>(i)];
  }
  if (sc.lambda0 != 1 && sc.lambda0 != 2) throw ValidationError("--lambda0 must be 1 or 2");
  sc.point.omega1 = energy_arg(a.omega1, "--omega1");
  sc.point.omega2 = energy_arg(a.omega2, "--omega2");
  for (double th : sc.theta)
    if (!(th > 0.0) || !(th < constants::pi))
      throw ValidationError("--theta values must lie strictly inside (0, pi)");
  validate_config(scenario_config(sc));
  return run_scenario(sc, g.overrides(), g.output).exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polarization-resolved single, double, and triple Compton scattering"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  g.seed_opt = app.add_option("--seed", g.seed, "Monte Carlo seed override");
  g.samples_opt = app.add_option("--samples", g.samples, "Monte Carlo sample count override")
                      ->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads for Monte Carlo totals")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", g.output, "output file (default stdout)");
  g.format_opt = app.add_option("--format", g.format, "output format: csv or json")
                     ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--allow-flagged", g.allow_flagged,
               "exit 0 even when numerical flags were raised");

  std::string run_path;
  CLI::App* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", run_path, "scenario JSON file")->required();

  std::vector<std::string> validate_paths;
  CLI::App* validate = app.add_subcommand("validate", "parse and validate scenario files");
  validate->add_option("scenarios", validate_paths, "scenario JSON files")->required();

  TotalArgs ta;
  CLI::App* total = app.add_subcommand("total", "total cross sections at one beam energy");
  total->add_option("--omega0", ta.omega0, "incoming photon energy, e.g. \"0.18 MeV\"")
      ->required();
  total->add_option("--electron-energy", ta.electron_energy,
                    "incoming electron energy (default: at rest)");
  total->add_option("--eps", ta.eps, "infrared cut energy (overrides --eps-divisor)");
  total->add_option("--eps-divisor", ta.eps_divisor, "infrared cut = omega0 / divisor")
      ->check(CLI::Range(1.0 + 1e-9, 1e12));
  total->add_option("--process", ta.processes, "processes to run: sc, dc, tc");

  PointArgs pa;
  CLI::App* point = app.add_subcommand("point", "differential point and three-photon state");
  point->add_option("--omega0", pa.omega0, "incoming photon energy")->required();
  point->add_option("--electron-energy", pa.electron_energy,
                    "incoming electron energy (default: at rest)");
  point->add_option("--eps", pa.eps, "infrared cut (default omega0/50)");
  point->add_option("--omega1", pa.omega1, "first outgoing photon energy")->required();
  point->add_option("--omega2", pa.omega2, "second outgoing photon energy")->required();
  point->add_option("--theta", pa.theta, "polar angle(s), 1 shared or 3 per leg")->required();
  point->add_option("--phi", pa.phi, "azimuths, 1 shared or 3 per leg (default mercedes)");
  point->add_option("--lambda0", pa.lambda0, "incoming polarization label (1 or 2)");
  point->add_option("--lambda", pa.lambda, "outgoing polarization labels, 3 values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_command(run_path, g);
    if (*validate) return validate_command(validate_paths);
    if (*total) return total_command(ta, g);
    if (*point) return point_command(pa, g);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const KinematicsError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
