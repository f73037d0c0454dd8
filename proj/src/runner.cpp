#include "mcompton/runner.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mcompton/constants.hpp"
#include "mcompton/errors.hpp"
#include "mcompton/xsec.hpp"

namespace mcompton {

namespace {

using nlohmann::json;

std::vector<double> axis_values(double lo, double hi, int n, bool log_scale) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    v[static_cast<std::size_t>(i)] =
        log_scale ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  return v;
}

// ---------------------------------------------------------------------------
// vector-valued Romberg, for integrating every polarization channel at once
// off a single amplitude table per abscissa

template <std::size_t N>
struct VecResult {
  std::array<double, N> value{};
  bool converged = false;
};

template <std::size_t N, class F>
VecResult<N> romberg_vec(F&& f, double a, double b, const RombergOptions& opt) {
  VecResult<N> res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  using Value = std::array<double, N>;
  std::vector<Value> row(static_cast<std::size_t>(opt.max_level) + 1);
  double h = b - a;
  {
    const Value fa = f(a), fb = f(b);
    for (std::size_t i = 0; i < N; ++i) row[0][i] = 0.5 * h * (fa[i] + fb[i]);
  }
  Value prev_diag = row[0];
  for (int k = 1; k <= opt.max_level; ++k) {
    const std::int64_t n_new = std::int64_t{1} << (k - 1);
    Value sum{};
    const double h2 = h * 0.5;
    for (std::int64_t i = 0; i < n_new; ++i) {
      const Value fi = f(a + h2 + static_cast<double>(i) * h);
      for (std::size_t c = 0; c < N; ++c) sum[c] += fi[c];
    }
    Value trap;
    for (std::size_t c = 0; c < N; ++c) trap[c] = 0.5 * row[0][c] + h2 * sum[c];
    Value prev = row[0];
    row[0] = trap;
    double pow4 = 4.0;
    for (int j = 1; j <= k; ++j) {
      Value cur;
      for (std::size_t c = 0; c < N; ++c)
        cur[c] = row[static_cast<std::size_t>(j - 1)][c] +
                 (row[static_cast<std::size_t>(j - 1)][c] - prev[c]) / (pow4 - 1.0);
      prev = row[static_cast<std::size_t>(j)];
      row[static_cast<std::size_t>(j)] = cur;
      pow4 *= 4.0;
    }
    h = h2;
    const Value& diag = row[static_cast<std::size_t>(k)];
    if (k >= 2) {
      // every component must settle on its own relative scale; channels span
      // decades and the comparisons downstream are per channel
      bool ok = true;
      for (std::size_t c = 0; c < N; ++c) {
        if (std::abs(diag[c] - prev_diag[c]) >
            opt.rel_tol * std::abs(diag[c]) + opt.abs_floor) {
          ok = false;
          break;
        }
      }
      if (ok) {
        res.value = diag;
        res.converged = true;
        return res;
      }
    }
    prev_diag = diag;
  }
  res.value = prev_diag;
  return res;
}

// tanh-sinh endpoint substitution, same rationale as the scalar romberg_de:
// phase-space boundary layers must not cap the convergence order
template <std::size_t N, class F>
VecResult<N> romberg_vec_de(F&& f, double a, double b, const RombergOptions& opt) {
  if (!(b > a)) {
    VecResult<N> res;
    res.converged = true;
    return res;
  }
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double q = 1.5707963267948966;
  auto g = [&](double u) -> std::array<double, N> {
    const double s = std::sinh(u);
    const double c = std::cosh(q * s);
    const double w = half * q * std::cosh(u) / (c * c);
    if (!(w > 0.0) || !std::isfinite(w)) return {};
    std::array<double, N> v = f(mid + half * std::tanh(q * s));
    for (double& x : v) x *= w;
    return v;
  };
  return romberg_vec<N>(g, -3.0, 3.0, opt);
}

template <std::size_t N, class F2>
VecResult<N> integrate_energies_tc_vec(const ScatterConfig& cfg, const Direction& d1,
                                       const Direction& d2, const Direction& d3,
                                       const EnergyCuts& cuts, const RombergOptions& opt,
                                       F2&& f) {
  VecResult<N> out;
  out.converged = true;
  const FourVector p_i = incoming_electron(cfg);
  const FourVector k0 = incoming_photon(cfg);
  const FourVector P = p_i + k0;
  const double m = std::sqrt(minkowski_norm2(p_i));
  const double cap2 = cfg.e_i + cfg.omega0 - m - cuts.eps1 - cuts.eps3;
  double w2max;
  try {
    w2max = omega_boundary(P, photon_four_vector(cuts.eps1, d1), d2, d3, cuts.eps3);
  } catch (const KinematicsError&) {
    return out;
  }
  w2max = std::min(w2max, cap2);
  if (!(w2max > cuts.eps2)) return out;
  const double cap1 = cfg.e_i + cfg.omega0 - m - cuts.eps2 - cuts.eps3;
  bool inner_ok = true;
  auto outer = [&](double t2) -> std::array<double, N> {
    const double w2 = std::exp(t2);
    double w1max;
    try {
      w1max = omega_boundary(P, photon_four_vector(w2, d2), d1, d3, cuts.eps3);
    } catch (const KinematicsError&) {
      return {};
    }
    w1max = std::min(w1max, cap1);
    if (!(w1max > cuts.eps1)) return {};
    auto inner = [&](double t1) -> std::array<double, N> {
      const double w1 = std::exp(t1);
      std::array<double, N> v = f(w1, w2);
      for (double& x : v) x *= w1;
      return v;
    };
    const VecResult<N> r = romberg_vec_de<N>(inner, std::log(cuts.eps1), std::log(w1max), opt);
    if (!r.converged) inner_ok = false;
    std::array<double, N> v = r.value;
    for (double& x : v) x *= w2;
    return v;
  };
  const VecResult<N> r2 = romberg_vec_de<N>(outer, std::log(cuts.eps2), std::log(w2max), opt);
  out.value = r2.value;
  out.converged = r2.converged && inner_ok;
  return out;
}

template <std::size_t N, class F1>
VecResult<N> integrate_energies_dc_vec(const ScatterConfig& cfg, const Direction& d1,
                                       const Direction& d2, const EnergyCuts& cuts,
                                       const RombergOptions& opt, F1&& f) {
  VecResult<N> out;
  out.converged = true;
  const FourVector p_i = incoming_electron(cfg);
  const FourVector k0 = incoming_photon(cfg);
  const FourVector P = p_i + k0;
  const double m = std::sqrt(minkowski_norm2(p_i));
  double w1max;
  try {
    w1max = omega_boundary(P, FourVector{}, d1, d2, cuts.eps2);
  } catch (const KinematicsError&) {
    return out;
  }
  w1max = std::min(w1max, cfg.e_i + cfg.omega0 - m - cuts.eps2);
  if (!(w1max > cuts.eps1)) return out;
  auto g = [&](double t1) -> std::array<double, N> {
    const double w1 = std::exp(t1);
    std::array<double, N> v = f(w1);
    for (double& x : v) x *= w1;
    return v;
  };
  const VecResult<N> r = romberg_vec_de<N>(g, std::log(cuts.eps1), std::log(w1max), opt);
  out.value = r.value;
  out.converged = r.converged;
  return out;
}

// ---------------------------------------------------------------------------
// result tables: every batch task produces column-named rows (nullopt = NA),
// then one emitter per format

using Cell = std::optional<double>;

struct ResultTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

void emit_csv(const ResultTable& t, std::ostream& out) {
  for (const auto& [k, v] : t.metadata) out << "# " << k << ": " << v << "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    out << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c])
        out << format_number(*row[c]);
      else
        out << "NA";
      out << (c + 1 < row.size() ? "," : "\n");
    }
  }
}

void emit_json_table(const ResultTable& t, std::ostream& out) {
  json doc;
  doc["schema"] = "mcompton/1";
  json meta = json::object();
  for (const auto& [k, v] : t.metadata) meta[k] = v;
  doc["metadata"] = meta;
  doc["columns"] = t.columns;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const Cell& c : row) {
      if (c)
        r.push_back(*c);
      else
        r.push_back(nullptr);
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << "\n";
}

void common_metadata(const Scenario& sc, ResultTable& t) {
  t.metadata.emplace_back("schema", "mcompton/1");
  t.metadata.emplace_back("scenario", sc.name);
  t.metadata.emplace_back("task", task_name(sc.task));
}

void beam_metadata(const Scenario& sc, ResultTable& t) {
  t.metadata.emplace_back("omega0_mev", format_number(sc.omega0));
  t.metadata.emplace_back("electron_energy_mev", format_number(sc.e_i));
  t.metadata.emplace_back("infrared_cut_mev", format_number(sc.eps));
  t.metadata.emplace_back("lambda0", std::to_string(sc.lambda0));
  const double gamma = sc.e_i / constants::electron_mass_mev;
  if (gamma > 1.0 + 1e-9) t.metadata.emplace_back("gamma_i", format_number(gamma));
}

void geometry_metadata(const Scenario& sc, ResultTable& t, bool with_theta) {
  std::ostringstream phis;
  phis << std::setprecision(12) << sc.phi[0] << " " << sc.phi[1] << " " << sc.phi[2];
  t.metadata.emplace_back("phi", phis.str());
  if (with_theta) {
    std::ostringstream th;
    th << std::setprecision(12) << sc.theta[0] << " " << sc.theta[1] << " " << sc.theta[2];
    t.metadata.emplace_back("theta", th.str());
    std::ostringstream lam;
    lam << sc.lambda[0] << sc.lambda[1] << sc.lambda[2];
    t.metadata.emplace_back("lambda", lam.str());
  }
}

// ---------------------------------------------------------------------------
// channel table at one (omega1, omega2) point, boost-aware, with every
// threshold meaning a lab-frame energy

struct TablePoint {
  bool open = false;  // allowed and above every threshold
  bool have_table = false;
  TcChannelTable table{};
};

TablePoint tc_table_at(const ScatterConfig& cfg, double w1, double w2, const Direction& d1,
                       const Direction& d2, const Direction& d3) {
  TablePoint out;
  if (!(w1 >= cfg.eps) || !(w2 >= cfg.eps)) return out;
  const ZBoost b = rest_frame_boost(cfg.e_i);
  TcKinematicPoint pt;
  double omega3_lab;
  if (b.beta > 0.0) {
    const ScatterConfig rcfg = rest_config(cfg);
    const Direction r1 = b.to_rest(d1), r2 = b.to_rest(d2), r3 = b.to_rest(d3);
    pt = build_tc_point(rcfg, PhotonLeg{b.omega_to_rest(w1, d1.theta), r1, 1},
                        PhotonLeg{b.omega_to_rest(w2, d2.theta), r2, 1}, r3);
    if (!pt.allowed) return out;
    omega3_lab = b.omega_to_lab(pt.omega3, pt.dir3.theta);
  } else {
    pt = build_tc_point(cfg, PhotonLeg{w1, d1, 1}, PhotonLeg{w2, d2, 1}, d3);
    if (!pt.allowed) return out;
    omega3_lab = pt.omega3;
  }
  if (!(omega3_lab >= cfg.eps)) return out;
  out.open = true;
  try {
    out.table = tc_channel_table(pt);
    out.have_table = true;
  } catch (const KinematicsError&) {
    out.have_table = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// task runners

void run_grid_s(const Scenario& sc, ResultTable& t, bool bar) {
  const ScatterConfig cfg = scenario_config(sc);
  const Direction d1{sc.theta[0], sc.phi[0]}, d2{sc.theta[1], sc.phi[1]},
      d3{sc.theta[2], sc.phi[2]};
  const auto a1 = axis_values(sc.grid.omega1_min, sc.grid.omega1_max, sc.grid.n1,
                              sc.grid.log_scale);
  const auto a2 = axis_values(sc.grid.omega2_min, sc.grid.omega2_max, sc.grid.n2,
                              sc.grid.log_scale);
  t.columns = {"omega1_mev", "omega2_mev", bar ? "Sbar" : "S"};
  for (double w2 : a2)
    for (double w1 : a1) {
      const PhotonLeg leg1{w1, d1, sc.lambda[0]};
      const PhotonLeg leg2{w2, d2, sc.lambda[1]};
      const MaskedValue mv = bar ? s_bar_value(cfg, leg1, leg2, d3)
                                 : s_value(cfg, leg1, leg2, d3, sc.lambda[2]);
      t.rows.push_back({w1, w2, mv.masked ? Cell{} : Cell{mv.value}});
    }
}

void run_grid_tau_q(const Scenario& sc, ResultTable& t, std::int64_t& flagged) {
  const ScatterConfig cfg = scenario_config(sc);
  const Direction d1{sc.theta[0], sc.phi[0]}, d2{sc.theta[1], sc.phi[1]},
      d3{sc.theta[2], sc.phi[2]};
  const auto a1 = axis_values(sc.grid.omega1_min, sc.grid.omega1_max, sc.grid.n1,
                              sc.grid.log_scale);
  const auto a2 = axis_values(sc.grid.omega2_min, sc.grid.omega2_max, sc.grid.n2,
                              sc.grid.log_scale);
  TauOptions topt;
  topt.gap_tol = 1e-5;  // plotting accuracy; anchors use the tight default
  t.columns = {"omega1_mev", "omega2_mev", "tau", "entropy"};
  for (double w2 : a2)
    for (double w1 : a1) {
      const TablePoint tp = tc_table_at(cfg, w1, w2, d1, d2, d3);
      if (!tp.open || !tp.have_table) {
        t.rows.push_back({w1, w2, Cell{}, Cell{}});
        continue;
      }
      const Matrix8 rho = density_matrix(tp.table, cfg.lambda0);
      const TauResult tr = genuine_entanglement_tau(rho, topt);
      if (!tr.converged) ++flagged;
      t.rows.push_back({w1, w2, tr.tau, von_neumann_entropy(rho)});
    }
}

void run_sweep(const Scenario& sc, const RunOverrides&, ResultTable& t,
               std::int64_t& flagged) {
  const ScatterConfig cfg = scenario_config(sc);
  t.columns = {"theta", "gamma_pi_minus_theta"};
  for (int l0 = 1; l0 <= 2; ++l0)
    for (int l1 = 1; l1 <= 2; ++l1)
      t.columns.push_back("sc_" + std::to_string(l0) + std::to_string(l1));
  for (int l0 = 1; l0 <= 2; ++l0)
    for (int l1 = 1; l1 <= 2; ++l1)
      for (int l2 = 1; l2 <= 2; ++l2)
        t.columns.push_back("dc_" + std::to_string(l0) + std::to_string(l1) +
                            std::to_string(l2));
  for (int l0 = 1; l0 <= 2; ++l0)
    for (int l1 = 1; l1 <= 2; ++l1)
      for (int l2 = 1; l2 <= 2; ++l2)
        for (int l3 = 1; l3 <= 2; ++l3)
          t.columns.push_back("tc_" + std::to_string(l0) + std::to_string(l1) +
                              std::to_string(l2) + std::to_string(l3));
  RombergOptions opt{1e-5, 9, 0.0};
  for (int i = 0; i < sc.sweep.n_theta; ++i) {
    const double theta = sc.sweep.theta_min +
                         (sc.sweep.theta_max - sc.sweep.theta_min) * i /
                             (sc.sweep.n_theta - 1);
    const SweepPoint p = sweep_point(cfg, sc.phi, theta, opt);
    if (!p.dc_converged || !p.tc_converged) ++flagged;
    std::vector<Cell> row{p.theta, p.gamma_pi_minus_theta};
    for (double v : p.sc) row.push_back(v);
    for (double v : p.dc) row.push_back(v);
    for (double v : p.tc) row.push_back(v);
    t.rows.push_back(std::move(row));
  }
}

void run_totals(const Scenario& sc, const RunOverrides& ov, ResultTable& t,
                std::int64_t& flagged) {
  McOptions mc;
  mc.samples = ov.samples.value_or(sc.mc.samples);
  mc.shards = sc.mc.shards;
  mc.threads = ov.threads;
  const std::uint64_t seed_base = ov.seed.value_or(sc.mc.seed);
  t.metadata.emplace_back("seed_base", std::to_string(seed_base));
  t.metadata.emplace_back("samples", std::to_string(mc.samples));
  t.metadata.emplace_back("eps_divisor", format_number(sc.totals.eps_divisor));
  t.metadata.emplace_back("er_ratio", "5");
  t.columns = {"omega0_mev",     "eps_mev",          "sigma_sc_b",     "sigma_dc_b",
               "sigma_dc_err_b", "sigma_tc_b",       "sigma_tc_err_b", "sigma_dc_nr_b",
               "sigma_tc_nr_b",  "sigma_dc_er_b",    "sigma_tc_er_b",  "flagged_dc",
               "flagged_tc"};
  for (std::size_t i = 0; i < sc.totals.omega0_values.size(); ++i) {
    const double w0 = sc.totals.omega0_values[i];
    ScatterConfig cfg;
    cfg.omega0 = w0;
    cfg.e_i = sc.e_i;
    cfg.eps = w0 / sc.totals.eps_divisor;
    cfg.lambda0 = 1;
    const double w0_rest = rest_config(cfg).omega0;
    std::vector<Cell> row{w0, cfg.eps};
    row.push_back(sc.totals.run_sc ? Cell{sigma_sc_total(w0_rest)} : Cell{});
    Cell dc_v, dc_e, tc_v, tc_e, dc_f, tc_f;
    if (sc.totals.run_dc) {
      mc.seed = seed_base + 2 * i;
      const IntegralEstimate est = total_cross_section(Process::DC, cfg, mc);
      dc_v = est.value;
      dc_e = est.stderror;
      dc_f = static_cast<double>(est.flagged);
      flagged += est.flagged;
    }
    if (sc.totals.run_tc) {
      mc.seed = seed_base + 2 * i + 1;
      const IntegralEstimate est = total_cross_section(Process::TC, cfg, mc);
      tc_v = est.value;
      tc_e = est.stderror;
      tc_f = static_cast<double>(est.flagged);
      flagged += est.flagged;
    }
    row.push_back(dc_v);
    row.push_back(dc_e);
    row.push_back(tc_v);
    row.push_back(tc_e);
    row.push_back(sigma_dc_nr(w0_rest));
    row.push_back(sigma_tc_nr(w0_rest));
    row.push_back(sigma_er(w0_rest, 1, 5.0));
    row.push_back(sigma_er(w0_rest, 2, 5.0));
    row.push_back(dc_f);
    row.push_back(tc_f);
    t.rows.push_back(std::move(row));
  }
}

json mat8_to_json(const Matrix8& m) {
  json rows = json::array();
  for (int r = 0; r < 8; ++r) {
    json row = json::array();
    for (int c = 0; c < 8; ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

json state_analysis(const Matrix8& rho, const TauOptions& topt, std::int64_t& flagged) {
  json out;
  out["rho"] = mat8_to_json(rho);
  out["entropy_bits"] = von_neumann_entropy(rho);
  out["purity"] = purity(rho);
  const Eigensystem8 eig = hermitian_eigensystem(rho);
  out["spectrum"] = eig.values;
  const TauResult tr = genuine_entanglement_tau(rho, topt);
  if (!tr.converged) ++flagged;
  out["tau"] = tr.tau;
  out["tau_objective"] = tr.objective;
  out["tau_converged"] = tr.converged;
  json cert;
  cert["subsets"] = json::array({"1", "2", "3", "12", "13", "23"});
  cert["w"] = mat8_to_json(tr.cert.w);
  json ps = json::array(), qs = json::array();
  for (std::size_t s = 0; s < 6; ++s) {
    ps.push_back(mat8_to_json(tr.cert.p[s]));
    qs.push_back(mat8_to_json(tr.cert.q[s]));
  }
  cert["p"] = std::move(ps);
  cert["q"] = std::move(qs);
  const CertificateCheck chk = verify_certificate(tr.cert, 1e-8);
  cert["verified"] = chk.ok;
  cert["max_spectrum_violation"] = chk.max_spectrum_violation;
  cert["max_reconstruction_error"] = chk.max_reconstruction_error;
  out["witness_certificate"] = std::move(cert);
  return out;
}

RunReport run_single_point(const Scenario& sc, const RunOverrides& ov, std::ostream& out) {
  RunReport rep;
  json doc;
  doc["schema"] = "mcompton/1";
  doc["name"] = sc.name;
  doc["task"] = "single-point";
  if (ov.format && *ov.format != "json")
    throw ValidationError("single-point results are JSON only");
  TauOptions topt;  // tight default
  if (sc.density_matrix) {
    doc["state_source"] = "given";
    doc["analysis"] = state_analysis(*sc.density_matrix, topt, rep.flagged);
  } else {
    const ScatterConfig cfg = scenario_config(sc);
    const Direction d1{sc.theta[0], sc.phi[0]}, d2{sc.theta[1], sc.phi[1]},
        d3{sc.theta[2], sc.phi[2]};
    json in;
    in["omega0_mev"] = sc.omega0;
    in["electron_energy_mev"] = sc.e_i;
    in["infrared_cut_mev"] = sc.eps;
    in["lambda0"] = sc.lambda0;
    in["theta"] = sc.theta;
    in["phi"] = sc.phi;
    in["omega1_mev"] = sc.point.omega1;
    in["omega2_mev"] = sc.point.omega2;
    doc["inputs"] = std::move(in);

    const PhotonLeg leg1{sc.point.omega1, d1, sc.lambda[0]};
    const PhotonLeg leg2{sc.point.omega2, d2, sc.lambda[1]};
    const bool boosted = sc.e_i > constants::electron_mass_mev &&
                         rest_frame_boost(sc.e_i).beta > 0.0;
    const DifferentialPoint ref =
        boosted ? dsigma_tc_lab_via_rest(cfg, leg1, leg2, d3, sc.lambda[2],
                                         SpinChannel::half_summed())
                : dsigma_tc(cfg, leg1, leg2, d3, sc.lambda[2], SpinChannel::half_summed());
    doc["allowed"] = ref.allowed;
    doc["omega3_mev"] = ref.omega_last;
    doc["final_electron_energy_mev"] = ref.e_f;
    const MaskedValue s = s_value(cfg, leg1, leg2, d3, sc.lambda[2]);
    const MaskedValue sbar = s_bar_value(cfg, leg1, leg2, d3);
    doc["S"] = s.masked ? json() : json(s.value);
    doc["Sbar"] = sbar.masked ? json() : json(sbar.value);

    const TablePoint tp = tc_table_at(cfg, sc.point.omega1, sc.point.omega2, d1, d2, d3);
    if (tp.open && tp.have_table) {
      json ch = json::object();
      for (int l0 = 1; l0 <= 2; ++l0)
        for (int l1 = 1; l1 <= 2; ++l1)
          for (int l2 = 1; l2 <= 2; ++l2)
            for (int l3 = 1; l3 <= 2; ++l3) {
              PhotonLeg e1 = leg1, e2 = leg2;
              e1.lambda = l1;
              e2.lambda = l2;
              ScatterConfig c0 = cfg;
              c0.lambda0 = l0;
              const DifferentialPoint dp =
                  boosted ? dsigma_tc_lab_via_rest(c0, e1, e2, d3, l3,
                                                   SpinChannel::half_summed())
                          : dsigma_tc(c0, e1, e2, d3, l3, SpinChannel::half_summed());
              ch[std::to_string(l0) + std::to_string(l1) + std::to_string(l2) +
                 std::to_string(l3)] = dp.value;
            }
      doc["dsigma_channels"] = std::move(ch);
      doc["analysis"] = state_analysis(density_matrix(tp.table, cfg.lambda0), topt,
                                       rep.flagged);
    } else {
      doc["dsigma_channels"] = json();
      doc["analysis"] = json();
    }
  }
  doc["flagged"] = rep.flagged;
  out << doc.dump(2) << "\n";
  if (rep.flagged > 0 && !ov.allow_flagged) rep.exit_code = 2;
  return rep;
}

}  // namespace

SweepPoint sweep_point(const ScatterConfig& cfg, const std::array<double, 3>& phi,
                       double theta, const RombergOptions& opt) {
  SweepPoint out;
  out.theta = theta;
  const ZBoost b = rest_frame_boost(cfg.e_i);
  const bool boosted = b.beta > 0.0;
  const ScatterConfig rcfg = boosted ? rest_config(cfg) : cfg;
  out.gamma_pi_minus_theta = b.gamma * (constants::pi - theta);

  const Direction lab1{theta, phi[0]}, lab2{theta, phi[1]}, lab3{theta, phi[2]};
  const Direction d1 = boosted ? b.to_rest(lab1) : lab1;
  const Direction d2 = boosted ? b.to_rest(lab2) : lab2;
  const Direction d3 = boosted ? b.to_rest(lab3) : lab3;

  // lab-frame infrared cut expressed on rest-frame energies, per leg
  const double e1 = boosted ? cfg.eps / (b.gamma * b.doppler_rest(d1.theta)) : cfg.eps;
  const double e2 = boosted ? cfg.eps / (b.gamma * b.doppler_rest(d2.theta)) : cfg.eps;
  const double e3 = boosted ? cfg.eps / (b.gamma * b.doppler_rest(d3.theta)) : cfg.eps;

  // per-leg solid-angle factors d Omega_rest / d Omega_lab
  const double one_minus_b2 = b.one_minus_beta * (1.0 + b.beta);
  auto leg_factor = [&](const Direction& rest) {
    if (!boosted) return 1.0;
    const double d = b.doppler_rest(rest.theta);
    return d * d / one_minus_b2;
  };
  const double f1 = leg_factor(d1), f2 = leg_factor(d2), f3 = leg_factor(d3);

  const ScKinematicPoint scp = build_sc_point(rcfg, d1);
  if (scp.allowed && scp.omega1 > e1) {
    for (int l0 = 1; l0 <= 2; ++l0)
      for (int l1 = 1; l1 <= 2; ++l1)
        out.sc[static_cast<std::size_t>((l0 - 1) * 2 + (l1 - 1))] =
            dsigma_sc_analytic(rcfg.omega0, d1, l0, l1) * f1;
  }

  auto dc_integrand = [&](double w1) -> std::array<double, 8> {
    std::array<double, 8> v{};
    const DcKinematicPoint pt = build_dc_point(rcfg, PhotonLeg{w1, d1, 1}, d2);
    if (!pt.allowed) return v;
    const double pref = dc_prefactor(pt);
    if (pref == 0.0) return v;
    DcChannelTable table;
    try {
      table = dc_channel_table(pt);
    } catch (const KinematicsError&) {
      return v;
    }
    for (int l0 = 1; l0 <= 2; ++l0)
      for (int l1 = 1; l1 <= 2; ++l1)
        for (int l2 = 1; l2 <= 2; ++l2)
          v[static_cast<std::size_t>((l0 - 1) * 4 + (l1 - 1) * 2 + (l2 - 1))] =
              pref * spin_weight(table, l0, l1, l2, SpinChannel::half_summed());
    return v;
  };
  const VecResult<8> dres =
      integrate_energies_dc_vec<8>(rcfg, d1, d2, EnergyCuts{e1, e2, 0.0}, opt, dc_integrand);
  for (std::size_t i = 0; i < 8; ++i) out.dc[i] = dres.value[i] * f1 * f2;
  out.dc_converged = dres.converged;

  auto tc_integrand = [&](double w1, double w2) -> std::array<double, 16> {
    std::array<double, 16> v{};
    const TcKinematicPoint pt =
        build_tc_point(rcfg, PhotonLeg{w1, d1, 1}, PhotonLeg{w2, d2, 1}, d3);
    if (!pt.allowed) return v;
    const double pref = tc_prefactor(pt);
    if (pref == 0.0) return v;
    TcChannelTable table;
    try {
      table = tc_channel_table(pt);
    } catch (const KinematicsError&) {
      return v;
    }
    for (int l0 = 1; l0 <= 2; ++l0)
      for (int l1 = 1; l1 <= 2; ++l1)
        for (int l2 = 1; l2 <= 2; ++l2)
          for (int l3 = 1; l3 <= 2; ++l3)
            v[static_cast<std::size_t>((l0 - 1) * 8 + (l1 - 1) * 4 + (l2 - 1) * 2 +
                                       (l3 - 1))] =
                pref * spin_weight(table, l0, l1, l2, l3, SpinChannel::half_summed());
    return v;
  };
  const VecResult<16> tres = integrate_energies_tc_vec<16>(
      rcfg, d1, d2, d3, EnergyCuts{e1, e2, e3}, opt, tc_integrand);
  for (std::size_t i = 0; i < 16; ++i) out.tc[i] = tres.value[i] * f1 * f2 * f3;
  out.tc_converged = tres.converged;
  return out;
}

RunReport run_scenario_to_stream(const Scenario& sc, const RunOverrides& ov,
                                 std::ostream& out) {
  if (ov.format && *ov.format != "csv" && *ov.format != "json")
    throw ValidationError("unknown output format \"" + *ov.format + "\"");
  if (sc.task == Task::SinglePoint) return run_single_point(sc, ov, out);

  RunReport rep;
  ResultTable t;
  common_metadata(sc, t);
  switch (sc.task) {
    case Task::GridS:
    case Task::GridSbar: {
      beam_metadata(sc, t);
      geometry_metadata(sc, t, true);
      run_grid_s(sc, t, sc.task == Task::GridSbar);
      break;
    }
    case Task::GridTauQ: {
      beam_metadata(sc, t);
      geometry_metadata(sc, t, true);
      run_grid_tau_q(sc, t, rep.flagged);
      break;
    }
    case Task::AngularSweep: {
      beam_metadata(sc, t);
      geometry_metadata(sc, t, false);
      run_sweep(sc, ov, t, rep.flagged);
      break;
    }
    case Task::TotalVsOmega0: {
      t.metadata.emplace_back("electron_energy_mev", format_number(sc.e_i));
      const double gamma = sc.e_i / constants::electron_mass_mev;
      if (gamma > 1.0 + 1e-9) t.metadata.emplace_back("gamma_i", format_number(gamma));
      run_totals(sc, ov, t, rep.flagged);
      break;
    }
    case Task::SinglePoint: break;  // handled above
  }
  t.metadata.emplace_back("flagged", std::to_string(rep.flagged));
  if (ov.format && *ov.format == "json")
    emit_json_table(t, out);
  else
    emit_csv(t, out);
  if (rep.flagged > 0 && !ov.allow_flagged) rep.exit_code = 2;
  return rep;
}

RunReport run_scenario(const Scenario& sc, const RunOverrides& ov,
                       const std::string& output_path) {
  if (output_path.empty()) {
    const RunReport rep = run_scenario_to_stream(sc, ov, std::cout);
    std::cout.flush();
    return rep;
  }
  std::ofstream f(output_path);
  if (!f) throw IoError("cannot open output file: " + output_path);
  const RunReport rep = run_scenario_to_stream(sc, ov, f);
  f.flush();
  if (!f) throw IoError("error writing output file: " + output_path);
  return rep;
}

}  // namespace mcompton
