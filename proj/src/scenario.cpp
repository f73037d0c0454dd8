#include "mcompton/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"

namespace mcompton {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ValidationError("scenario: " + where + ": " + msg);
}

void require_object(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where, "expected an object");
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(where, "unknown key \"" + item.key() + "\"");
  }
}

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "value is not finite");
  return x;
}

double energy_value(const json& v, const std::string& where) {
  if (v.is_number()) return finite_number(v, where);
  if (v.is_string()) {
    try {
      return parse_energy_mev(v.get<std::string>());
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
  fail(where, "expected a number (MeV) or a string with an energy unit");
}

int int_in_range(const json& v, const std::string& where, int lo, int hi) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > hi) {
    std::ostringstream os;
    os << "expected an integer in [" << lo << ", " << hi << "]";
    fail(where, os.str());
  }
  return static_cast<int>(x);
}

std::array<double, 2> energy_pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fail(where, "expected [min, max]");
  return {energy_value(v[0], where + "[0]"), energy_value(v[1], where + "[1]")};
}

void parse_beam(const json& b, Scenario& sc) {
  require_object(b, "beam");
  check_keys(b, "beam", {"omega0", "electron_energy", "infrared_cut", "lambda0"});
  if (b.contains("omega0")) sc.omega0 = energy_value(b["omega0"], "beam.omega0");
  if (!b.contains("electron_energy")) fail("beam", "missing \"electron_energy\"");
  sc.e_i = energy_value(b["electron_energy"], "beam.electron_energy");
  if (b.contains("infrared_cut")) sc.eps = energy_value(b["infrared_cut"], "beam.infrared_cut");
  if (b.contains("lambda0")) sc.lambda0 = int_in_range(b["lambda0"], "beam.lambda0", 1, 2);
}

void parse_geometry(const json& g, Scenario& sc, bool want_theta) {
  require_object(g, "geometry");
  check_keys(g, "geometry", {"theta", "phi", "lambda"});
  if (g.contains("theta")) {
    if (!want_theta)
      fail("geometry.theta", "not used by this task (the sweep provides the angle)");
    const json& t = g["theta"];
    if (t.is_number()) {
      sc.theta.fill(finite_number(t, "geometry.theta"));
    } else if (t.is_array() && t.size() == 3) {
      for (int j = 0; j < 3; ++j)
        sc.theta[static_cast<std::size_t>(j)] =
            finite_number(t[static_cast<std::size_t>(j)], "geometry.theta[j]");
    } else {
      fail("geometry.theta", "expected a number or an array of three numbers");
    }
    for (double th : sc.theta)
      if (!(th > 0.0 && th < constants::pi))
        fail("geometry.theta", "polar angles must lie strictly between 0 and pi");
  } else if (want_theta) {
    fail("geometry", "missing \"theta\"");
  }
  if (!g.contains("phi")) fail("geometry", "missing \"phi\"");
  const json& p = g["phi"];
  if (p.is_string()) {
    if (p.get<std::string>() != "mercedes")
      fail("geometry.phi", "the only named preset is \"mercedes\"");
    for (int j = 0; j < 3; ++j)
      sc.phi[static_cast<std::size_t>(j)] = 2.0 * (j + 1) * constants::pi / 3.0;
  } else if (p.is_array() && p.size() == 3) {
    for (int j = 0; j < 3; ++j)
      sc.phi[static_cast<std::size_t>(j)] =
          finite_number(p[static_cast<std::size_t>(j)], "geometry.phi[j]");
  } else {
    fail("geometry.phi", "expected \"mercedes\" or an array of three numbers");
  }
  if (g.contains("lambda")) {
    const json& l = g["lambda"];
    if (!l.is_array() || l.size() != 3)
      fail("geometry.lambda", "expected an array of three labels (1 or 2)");
    for (int j = 0; j < 3; ++j)
      sc.lambda[static_cast<std::size_t>(j)] =
          int_in_range(l[static_cast<std::size_t>(j)], "geometry.lambda[j]", 1, 2);
  }
}

void parse_grid(const json& g, Scenario& sc) {
  require_object(g, "grid");
  check_keys(g, "grid", {"n1", "n2", "omega1", "omega2", "scale"});
  if (!g.contains("omega1") || !g.contains("omega2"))
    fail("grid", "missing \"omega1\" / \"omega2\" ranges");
  const auto r1 = energy_pair(g["omega1"], "grid.omega1");
  const auto r2 = energy_pair(g["omega2"], "grid.omega2");
  sc.grid.omega1_min = r1[0];
  sc.grid.omega1_max = r1[1];
  sc.grid.omega2_min = r2[0];
  sc.grid.omega2_max = r2[1];
  if (g.contains("n1")) sc.grid.n1 = int_in_range(g["n1"], "grid.n1", 2, 4096);
  if (g.contains("n2")) sc.grid.n2 = int_in_range(g["n2"], "grid.n2", 2, 4096);
  if (g.contains("scale")) {
    const json& s = g["scale"];
    if (!s.is_string()) fail("grid.scale", "expected \"linear\" or \"log\"");
    const std::string v = s.get<std::string>();
    if (v == "log")
      sc.grid.log_scale = true;
    else if (v != "linear")
      fail("grid.scale", "expected \"linear\" or \"log\"");
  }
  if (!(sc.grid.omega1_min > 0.0) || !(sc.grid.omega2_min > 0.0))
    fail("grid", "range minima must be positive");
  if (!(sc.grid.omega1_max > sc.grid.omega1_min) || !(sc.grid.omega2_max > sc.grid.omega2_min))
    fail("grid", "range maxima must exceed the minima");
}

void parse_sweep(const json& s, Scenario& sc) {
  require_object(s, "sweep");
  check_keys(s, "sweep", {"n_theta", "theta"});
  if (!s.contains("theta")) fail("sweep", "missing \"theta\" range");
  const json& t = s["theta"];
  if (!t.is_array() || t.size() != 2) fail("sweep.theta", "expected [min, max]");
  sc.sweep.theta_min = finite_number(t[0], "sweep.theta[0]");
  sc.sweep.theta_max = finite_number(t[1], "sweep.theta[1]");
  if (!(sc.sweep.theta_min > 0.0) || !(sc.sweep.theta_max < constants::pi) ||
      !(sc.sweep.theta_max > sc.sweep.theta_min))
    fail("sweep.theta", "need 0 < min < max < pi");
  if (s.contains("n_theta")) sc.sweep.n_theta = int_in_range(s["n_theta"], "sweep.n_theta", 2, 4096);
}

void parse_totals(const json& t, Scenario& sc) {
  require_object(t, "totals");
  check_keys(t, "totals", {"omega0_values", "eps_divisor", "processes"});
  if (!t.contains("omega0_values")) fail("totals", "missing \"omega0_values\"");
  const json& vals = t["omega0_values"];
  if (!vals.is_array() || vals.empty()) fail("totals.omega0_values", "expected a nonempty array");
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double w = energy_value(vals[i], "totals.omega0_values[i]");
    if (!(w > 0.0)) fail("totals.omega0_values", "photon energies must be positive");
    sc.totals.omega0_values.push_back(w);
  }
  if (t.contains("eps_divisor")) {
    sc.totals.eps_divisor = finite_number(t["eps_divisor"], "totals.eps_divisor");
    if (!(sc.totals.eps_divisor > 1.0)) fail("totals.eps_divisor", "must exceed 1");
  }
  if (t.contains("processes")) {
    const json& p = t["processes"];
    if (!p.is_array() || p.empty()) fail("totals.processes", "expected a nonempty array");
    sc.totals.run_sc = sc.totals.run_dc = sc.totals.run_tc = false;
    for (const json& e : p) {
      if (!e.is_string()) fail("totals.processes", "expected strings");
      const std::string v = e.get<std::string>();
      if (v == "sc")
        sc.totals.run_sc = true;
      else if (v == "dc")
        sc.totals.run_dc = true;
      else if (v == "tc")
        sc.totals.run_tc = true;
      else
        fail("totals.processes", "unknown process \"" + v + "\"");
    }
  }
}

void parse_point(const json& p, Scenario& sc) {
  require_object(p, "point");
  check_keys(p, "point", {"omega1", "omega2"});
  if (!p.contains("omega1") || !p.contains("omega2"))
    fail("point", "missing \"omega1\" / \"omega2\"");
  sc.point.omega1 = energy_value(p["omega1"], "point.omega1");
  sc.point.omega2 = energy_value(p["omega2"], "point.omega2");
  if (!(sc.point.omega1 > 0.0) || !(sc.point.omega2 > 0.0))
    fail("point", "photon energies must be positive");
}

void parse_mc(const json& m, Scenario& sc) {
  require_object(m, "mc");
  check_keys(m, "mc", {"seed", "samples", "shards"});
  if (m.contains("seed")) {
    if (!m["seed"].is_number_unsigned() && !m["seed"].is_number_integer())
      fail("mc.seed", "expected a nonnegative integer");
    const auto s = m["seed"].get<std::int64_t>();
    if (s < 0) fail("mc.seed", "expected a nonnegative integer");
    sc.mc.seed = static_cast<std::uint64_t>(s);
  }
  if (m.contains("samples")) {
    if (!m["samples"].is_number_integer()) fail("mc.samples", "expected an integer");
    sc.mc.samples = m["samples"].get<std::int64_t>();
    if (sc.mc.samples < 1) fail("mc.samples", "need at least one sample");
  }
  if (m.contains("shards")) sc.mc.shards = int_in_range(m["shards"], "mc.shards", 1, 1 << 20);
}

void parse_density_matrix(const json& d, Scenario& sc) {
  if (!d.is_array() || d.size() != 8) fail("density_matrix", "expected 8 rows");
  Matrix8 rho;
  for (int r = 0; r < 8; ++r) {
    const json& row = d[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 8) fail("density_matrix", "expected 8 entries per row");
    for (int c = 0; c < 8; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2)
        fail("density_matrix", "expected [re, im] pairs");
      rho(r, c) = cplx{finite_number(e[0], "density_matrix re"),
                       finite_number(e[1], "density_matrix im")};
    }
  }
  double scale = 0.0;
  for (const cplx& z : rho.a) scale = std::max(scale, std::abs(z));
  if (!(scale > 0.0)) fail("density_matrix", "matrix is zero");
  double herm_dev = 0.0;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      herm_dev = std::max(herm_dev, std::abs(rho(r, c) - std::conj(rho(c, r))));
  if (herm_dev > 1e-8 * scale) fail("density_matrix", "matrix is not Hermitian");
  const double tr = trace(rho).real();
  if (std::abs(tr - 1.0) > 1e-6) fail("density_matrix", "trace must be 1");
  const Eigensystem8 eig = hermitian_eigensystem(rho);
  if (eig.values.back() < -1e-8) fail("density_matrix", "matrix is not positive semidefinite");
  sc.density_matrix = rho;
}

void validate_beam_complete(const Scenario& sc) {
  if (!(sc.omega0 > 0.0)) fail("beam.omega0", "required and must be positive");
  if (!(sc.e_i >= constants::electron_mass_mev))
    fail("beam.electron_energy", "must be at least the electron mass");
  if (!(sc.eps > 0.0)) fail("beam.infrared_cut", "required and must be positive");
  if (!(sc.eps < sc.omega0 + sc.e_i - constants::electron_mass_mev))
    fail("beam.infrared_cut", "exceeds the available energy");
}

}  // namespace

const char* task_name(Task t) {
  switch (t) {
    case Task::GridS: return "grid-S";
    case Task::GridSbar: return "grid-Sbar";
    case Task::GridTauQ: return "grid-tau-Q";
    case Task::AngularSweep: return "angular-sweep";
    case Task::TotalVsOmega0: return "total-vs-omega0";
    case Task::SinglePoint: return "single-point";
  }
  return "?";
}

double parse_energy_mev(const std::string& text) {
  std::size_t begin = 0, end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  const std::string body = text.substr(begin, end - begin);
  if (body.empty()) throw ValidationError("empty energy value");
  // longest suffix first: "MeV"/"keV"/"GeV" all end in "eV"
  static const std::pair<const char*, double> units[] = {
      {"GeV", 1e3}, {"MeV", 1.0}, {"keV", 1e-3}, {"eV", 1e-6}};
  double scale = 1.0;
  std::string num = body;
  for (const auto& [suffix, s] : units) {
    const std::size_t n = std::string(suffix).size();
    if (body.size() > n && body.compare(body.size() - n, n, suffix) == 0) {
      scale = s;
      num = body.substr(0, body.size() - n);
      while (!num.empty() && std::isspace(static_cast<unsigned char>(num.back()))) num.pop_back();
      break;
    }
  }
  std::size_t consumed = 0;
  double value;
  try {
    value = std::stod(num, &consumed);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse energy \"" + text + "\"");
  }
  if (consumed != num.size() || !std::isfinite(value))
    throw ValidationError("cannot parse energy \"" + text + "\"");
  return value * scale;
}

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: invalid JSON: ") + e.what());
  }
  require_object(doc, "top level");
  check_keys(doc, "top level",
             {"schema", "name", "task", "beam", "geometry", "grid", "sweep", "totals", "point",
              "mc", "density_matrix"});
  if (!doc.contains("schema") || !doc["schema"].is_string() ||
      doc["schema"].get<std::string>() != "mcompton/1")
    fail("schema", "expected \"mcompton/1\"");
  if (!doc.contains("name") || !doc["name"].is_string() || doc["name"].get<std::string>().empty())
    fail("name", "required nonempty string");
  if (!doc.contains("task") || !doc["task"].is_string()) fail("task", "required string");

  Scenario sc;
  sc.name = doc["name"].get<std::string>();
  const std::string task = doc["task"].get<std::string>();
  if (task == "grid-S")
    sc.task = Task::GridS;
  else if (task == "grid-Sbar")
    sc.task = Task::GridSbar;
  else if (task == "grid-tau-Q")
    sc.task = Task::GridTauQ;
  else if (task == "angular-sweep")
    sc.task = Task::AngularSweep;
  else if (task == "total-vs-omega0")
    sc.task = Task::TotalVsOmega0;
  else if (task == "single-point")
    sc.task = Task::SinglePoint;
  else
    fail("task", "unknown task \"" + task + "\"");

  auto forbid = [&](const char* key, const char* why) {
    if (doc.contains(key)) fail(key, std::string("not used by this task (") + why + ")");
  };

  const bool is_grid =
      sc.task == Task::GridS || sc.task == Task::GridSbar || sc.task == Task::GridTauQ;

  if (sc.task == Task::SinglePoint && doc.contains("density_matrix")) {
    forbid("beam", "the density matrix is given directly");
    forbid("geometry", "the density matrix is given directly");
    forbid("point", "the density matrix is given directly");
    forbid("grid", "single-point task");
    forbid("sweep", "single-point task");
    forbid("totals", "single-point task");
    forbid("mc", "single-point task");
    parse_density_matrix(doc["density_matrix"], sc);
    return sc;
  }
  if (doc.contains("density_matrix") && sc.task != Task::SinglePoint)
    fail("density_matrix", "only the single-point task analyzes a given state");

  if (!doc.contains("beam")) fail("beam", "required section");
  parse_beam(doc["beam"], sc);

  if (sc.task == Task::TotalVsOmega0) {
    forbid("geometry", "totals integrate over all angles");
    forbid("grid", "totals task");
    forbid("sweep", "totals task");
    forbid("point", "totals task");
    if (!doc.contains("totals")) fail("totals", "required section");
    parse_totals(doc["totals"], sc);
    if (doc.contains("mc")) parse_mc(doc["mc"], sc);
    if (sc.omega0 != 0.0) fail("beam.omega0", "totals take energies from totals.omega0_values");
    if (sc.eps != 0.0) fail("beam.infrared_cut", "totals derive the cut from totals.eps_divisor");
    if (!(sc.e_i >= constants::electron_mass_mev))
      fail("beam.electron_energy", "must be at least the electron mass");
    return sc;
  }

  forbid("totals", "only total-vs-omega0 uses it");
  if (!doc.contains("geometry")) fail("geometry", "required section");
  parse_geometry(doc["geometry"], sc, sc.task != Task::AngularSweep);
  validate_beam_complete(sc);

  if (is_grid) {
    forbid("sweep", "grid task");
    forbid("point", "grid task");
    if (!doc.contains("grid")) fail("grid", "required section");
    parse_grid(doc["grid"], sc);
  } else if (sc.task == Task::AngularSweep) {
    forbid("grid", "sweep task");
    forbid("point", "sweep task");
    if (!doc.contains("sweep")) fail("sweep", "required section");
    parse_sweep(doc["sweep"], sc);
  } else {  // SinglePoint with kinematics
    forbid("grid", "single-point task");
    forbid("sweep", "single-point task");
    if (!doc.contains("point")) fail("point", "required section");
    parse_point(doc["point"], sc);
  }
  if (doc.contains("mc")) parse_mc(doc["mc"], sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read scenario file: " + path);
  return parse_scenario(buf.str());
}

ScatterConfig scenario_config(const Scenario& sc) {
  ScatterConfig cfg;
  cfg.omega0 = sc.omega0;
  cfg.e_i = sc.e_i;
  cfg.eps = sc.eps;
  cfg.lambda0 = sc.lambda0;
  return cfg;
}

}  // namespace mcompton
