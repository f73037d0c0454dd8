#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"
#include "mcompton/runner.hpp"
#include "mcompton/scenario.hpp"

using namespace mcompton;

namespace {

std::string grid_doc() {
  return R"({
    "schema": "mcompton/1",
    "name": "unit-grid",
    "task": "grid-S",
    "beam": {"omega0": "0.18 MeV", "electron_energy": "0.51099895 MeV",
             "infrared_cut": "3.6 keV", "lambda0": 1},
    "geometry": {"theta": 0.5, "phi": "mercedes", "lambda": [1, 1, 1]},
    "grid": {"n1": 3, "n2": 3, "omega1": ["3.6 keV", "0.175 MeV"],
             "omega2": ["3.6 keV", "0.175 MeV"], "scale": "linear"}
  })";
}

}  // namespace

TEST_CASE("energy strings parse with unit suffixes") {
  CHECK(parse_energy_mev("0.18 MeV") == doctest::Approx(0.18));
  CHECK(parse_energy_mev("3.6 keV") == doctest::Approx(0.0036));
  CHECK(parse_energy_mev("2.5 eV") == doctest::Approx(2.5e-6));
  CHECK(parse_energy_mev("50 GeV") == doctest::Approx(5e4));
  CHECK(parse_energy_mev("  7.25  ") == doctest::Approx(7.25));
  CHECK_THROWS_AS(parse_energy_mev("fast"), ValidationError);
  CHECK_THROWS_AS(parse_energy_mev("1.0 parsec"), ValidationError);
  CHECK_THROWS_AS(parse_energy_mev(""), ValidationError);
}

TEST_CASE("a complete grid scenario parses with mercedes azimuths") {
  const Scenario sc = parse_scenario(grid_doc());
  CHECK(sc.name == "unit-grid");
  CHECK(sc.task == Task::GridS);
  CHECK(sc.omega0 == doctest::Approx(0.18));
  CHECK(sc.e_i == doctest::Approx(constants::electron_mass_mev));
  CHECK(sc.eps == doctest::Approx(0.0036));
  CHECK(sc.theta[0] == doctest::Approx(0.5));
  CHECK(sc.theta[2] == doctest::Approx(0.5));
  CHECK(sc.phi[0] == doctest::Approx(2.0 * constants::pi / 3.0));
  CHECK(sc.phi[1] == doctest::Approx(4.0 * constants::pi / 3.0));
  CHECK(sc.phi[2] == doctest::Approx(2.0 * constants::pi));
  CHECK(sc.grid.n1 == 3);
  CHECK_FALSE(sc.grid.log_scale);
  const ScatterConfig cfg = scenario_config(sc);
  CHECK(cfg.omega0 == sc.omega0);
  CHECK(cfg.lambda0 == 1);
}

TEST_CASE("unknown keys anywhere are rejected") {
  auto doc = nlohmann::json::parse(grid_doc());
  doc["surprise"] = 1;
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
  doc = nlohmann::json::parse(grid_doc());
  doc["beam"]["color"] = "red";
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
  doc = nlohmann::json::parse(grid_doc());
  doc["grid"]["n3"] = 4;
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
}

TEST_CASE("schema marker and task names are enforced") {
  auto doc = nlohmann::json::parse(grid_doc());
  doc["schema"] = "mcompton/2";
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
  doc = nlohmann::json::parse(grid_doc());
  doc["task"] = "grid-X";
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
}

TEST_CASE("beam bounds are validated") {
  auto doc = nlohmann::json::parse(grid_doc());
  doc["beam"]["infrared_cut"] = "0 MeV";
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
  doc = nlohmann::json::parse(grid_doc());
  doc["beam"]["electron_energy"] = "0.1 MeV";  // below the electron mass
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
  doc = nlohmann::json::parse(grid_doc());
  doc["beam"]["lambda0"] = 3;
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
}

TEST_CASE("angular sweep refuses a fixed polar angle") {
  const std::string sweep_doc = R"({
    "schema": "mcompton/1",
    "name": "unit-sweep",
    "task": "angular-sweep",
    "beam": {"omega0": "0.18 MeV", "electron_energy": "0.51099895 MeV",
             "infrared_cut": "3.6 keV"},
    "geometry": {"phi": "mercedes"},
    "sweep": {"n_theta": 5, "theta": [0.2, 3.0]}
  })";
  const Scenario sc = parse_scenario(sweep_doc);
  CHECK(sc.task == Task::AngularSweep);
  CHECK(sc.sweep.n_theta == 5);
  auto doc = nlohmann::json::parse(sweep_doc);
  doc["geometry"]["theta"] = 0.5;  // the sweep provides the angle
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
}

TEST_CASE("totals task owns the beam energy axis") {
  const std::string totals_doc = R"({
    "schema": "mcompton/1",
    "name": "unit-totals",
    "task": "total-vs-omega0",
    "beam": {"electron_energy": "0.51099895 MeV"},
    "totals": {"omega0_values": ["0.01 MeV", "0.1 MeV"], "eps_divisor": 50,
               "processes": ["sc", "dc"]},
    "mc": {"seed": 3, "samples": 50, "shards": 8}
  })";
  const Scenario sc = parse_scenario(totals_doc);
  CHECK(sc.totals.omega0_values.size() == 2);
  CHECK(sc.totals.run_sc);
  CHECK(sc.totals.run_dc);
  CHECK_FALSE(sc.totals.run_tc);
  CHECK(sc.mc.samples == 50);
  auto doc = nlohmann::json::parse(totals_doc);
  doc["beam"]["omega0"] = "1 MeV";  // conflicts with the omega0_values axis
  CHECK_THROWS_AS((void)parse_scenario(doc.dump()), ValidationError);
}

TEST_CASE("density matrix import validates hermiticity, trace, positivity") {
  nlohmann::json doc;
  doc["schema"] = "mcompton/1";
  doc["name"] = "unit-state";
  doc["task"] = "single-point";
  auto mat = nlohmann::json::array();
  for (int r = 0; r < 8; ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < 8; ++c) {
      const double re = (r == c) ? ((r == 0 || r == 7) ? 0.5 : 0.0)
                                 : ((r + c == 7 && (r == 0 || r == 7)) ? 0.5 : 0.0);
      row.push_back(nlohmann::json::array({re, 0.0}));
    }
    mat.push_back(row);
  }
  doc["density_matrix"] = mat;
  const Scenario sc = parse_scenario(doc.dump());
  REQUIRE(sc.density_matrix.has_value());
  CHECK(std::abs(trace(*sc.density_matrix).real() - 1.0) < 1e-12);

  auto bad = doc;
  bad["density_matrix"][0][1] = nlohmann::json::array({0.5, 0.1});  // breaks hermiticity
  CHECK_THROWS_AS((void)parse_scenario(bad.dump()), ValidationError);
  bad = doc;
  bad["density_matrix"][0][0] = nlohmann::json::array({0.9, 0.0});  // trace off
  CHECK_THROWS_AS((void)parse_scenario(bad.dump()), ValidationError);
  bad = doc;
  bad["beam"] = {{"omega0", "1 MeV"}, {"electron_energy", "1 MeV"}, {"infrared_cut", "1 keV"}};
  CHECK_THROWS_AS((void)parse_scenario(bad.dump()), ValidationError);
}

TEST_CASE("missing files raise io errors, not validation errors") {
  CHECK_THROWS_AS((void)load_scenario("/definitely/not/here.json"), IoError);
}

TEST_CASE("grid run emits metadata, header, and NA-masked cells") {
  const Scenario sc = parse_scenario(grid_doc());
  std::ostringstream out;
  const RunReport rep = run_scenario_to_stream(sc, RunOverrides{}, out);
  CHECK(rep.exit_code == 0);
  const std::string text = out.str();
  CHECK(text.find("# schema: mcompton/1") != std::string::npos);
  CHECK(text.find("# task: grid-S") != std::string::npos);
  CHECK(text.find("omega1_mev,omega2_mev,S") != std::string::npos);
  CHECK(text.find("NA") != std::string::npos);  // top-right corner is outside phase space
  int rows = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#' && line.find("omega1") == std::string::npos) ++rows;
  CHECK(rows == 9);
}

TEST_CASE("json output carries the same rows as csv") {
  const Scenario sc = parse_scenario(grid_doc());
  RunOverrides ov;
  ov.format = "json";
  std::ostringstream out;
  run_scenario_to_stream(sc, ov, out);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc["schema"] == "mcompton/1");
  CHECK(doc["columns"].size() == 3);
  CHECK(doc["rows"].size() == 9);
  bool has_null = false;
  for (const auto& row : doc["rows"]) has_null = has_null || row[2].is_null();
  CHECK(has_null);
}

TEST_CASE("single-point analysis of a given state recovers the GHZ anchor") {
  nlohmann::json doc;
  doc["schema"] = "mcompton/1";
  doc["name"] = "unit-ghz";
  doc["task"] = "single-point";
  const Matrix8 ghz = ghz_projector();
  auto mat = nlohmann::json::array();
  for (int r = 0; r < 8; ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < 8; ++c)
      row.push_back(nlohmann::json::array({ghz(r, c).real(), ghz(r, c).imag()}));
    mat.push_back(row);
  }
  doc["density_matrix"] = mat;
  const Scenario sc = parse_scenario(doc.dump());
  std::ostringstream out;
  const RunReport rep = run_scenario_to_stream(sc, RunOverrides{}, out);
  CHECK(rep.exit_code == 0);
  const auto result = nlohmann::json::parse(out.str());
  CHECK(result["task"] == "single-point");
  CHECK(result["analysis"]["tau"].get<double>() == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(result["analysis"]["entropy_bits"].get<double>() < 1e-10);
  CHECK(result["analysis"]["witness_certificate"]["verified"].get<bool>());
  // csv makes no sense for a nested report
  RunOverrides csv;
  csv.format = "csv";
  std::ostringstream dummy;
  CHECK_THROWS_AS((void)run_scenario_to_stream(sc, csv, dummy), ValidationError);
}

TEST_CASE("angular sweep emits every polarization channel column") {
  const std::string sweep_doc = R"({
    "schema": "mcompton/1",
    "name": "unit-sweep-run",
    "task": "angular-sweep",
    "beam": {"omega0": "0.18 MeV", "electron_energy": "0.51099895 MeV",
             "infrared_cut": "3.6 keV"},
    "geometry": {"phi": "mercedes"},
    "sweep": {"n_theta": 2, "theta": [0.6, 1.2]}
  })";
  const Scenario sc = parse_scenario(sweep_doc);
  std::ostringstream out;
  run_scenario_to_stream(sc, RunOverrides{}, out);
  const std::string text = out.str();
  CHECK(text.find("sc_11") != std::string::npos);
  CHECK(text.find("dc_121") != std::string::npos);
  CHECK(text.find("tc_2222") != std::string::npos);
  CHECK(text.find("gamma_pi_minus_theta") != std::string::npos);
}
