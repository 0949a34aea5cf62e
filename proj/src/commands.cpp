#include "sklab/commands.hpp"

#include "sklab/full_model.hpp"
#include "sklab/io.hpp"
#include "sklab/limits.hpp"
#include "sklab/numerics.hpp"
#include "sklab/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>

#include <omp.h>

namespace sklab::commands {

namespace {

namespace fs = std::filesystem;

json envelope(const config::RunConfig& cfg, const std::string& command) {
  return {{"command", command}, {"version", kVersion}, {"config", config::to_json(cfg)}};
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

int worker_count(const config::RunConfig& cfg) {
  return cfg.workers > 0 ? cfg.workers : kernels::max_threads();
}

// ---------------------------------------------------------------------------
// simulate

std::vector<double> time_grid(const config::SimulationConfig& s) {
  auto grid = tomography::linspace(0.0, s.t_max, s.n_times);
  grid.insert(grid.end(), s.snapshot_times.begin(), s.snapshot_times.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             grid.end());
  return grid;
}

std::size_t nearest_index(const std::vector<double>& grid, double t) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (std::abs(grid[k] - t) < std::abs(grid[best] - t)) best = k;
  }
  return best;
}

fock::DensityMatrix rotated(const fock::DensityMatrix& rho, double theta) {
  if (theta == 0.0) return rho;
  const auto n = rho.dim();
  CVector phase(n);
  for (Eigen::Index k = 0; k < n; ++k) phase[k] = std::exp(cplx(0.0, -theta * static_cast<double>(k)));
  CMatrix m = phase.asDiagonal() * rho.matrix() * phase.conjugate().asDiagonal();
  return fock::DensityMatrix::unchecked(std::move(m), rho.modes());
}

struct EffectiveSetup {
  model::EffectiveParams eff;
  double gamma = 0.0;
  double gamma_phi = 0.0;
};

EffectiveSetup effective_setup(const config::RunConfig& cfg) {
  const auto& s = cfg.simulation;
  EffectiveSetup e;
  if (s.derive) {
    e.eff = model::effective_params(cfg.device, cfg.drive_params());
  } else {
    e.eff.detuning = s.detuning;
    e.eff.epsilon = s.epsilon * std::exp(cplx(0.0, s.epsilon_phase));
    e.eff.kerr = s.kerr;
  }
  if (s.decay_time > 0.0) e.gamma = 1.0 / s.decay_time;
  if (s.dephasing_time > 0.0) e.gamma_phi = 1.0 / s.dephasing_time;
  if (s.inherited_dephasing) e.gamma_phi += model::inherited_dephasing(s.p_e, cfg.device, cfg.drives.delta_a);
  return e;
}

json snapshot_json(const fock::DensityMatrix& phonon, double t, const std::string& file,
                   const config::SimulationConfig& s, const fs::path& out_dir) {
  const auto xs = tomography::linspace(-s.wigner_extent, s.wigner_extent, s.wigner_points);
  std::vector<std::string> warnings;
  const auto view = rotated(phonon, s.wigner_rotation);
  const auto map = tomography::wigner(view, xs, xs, kernels::Exec::parallel, &warnings);
  io::write_text(out_dir / file, io::wigner_csv(map));
  const auto q = tomography::qfi_max(phonon);
  json j = {{"t_us", t},
            {"file", file},
            {"wigner_min", map.min()},
            {"wigner_negative_volume", map.negative_volume()},
            {"wigner_integral", map.integral()},
            {"stats", io::stats_json(tomography::covariance_from_rho(phonon))},
            {"qfi_max", q.f_max},
            {"qfi_theta", q.theta}};
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

std::string time_tag(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

}  // namespace

json cmd_simulate(const config::RunConfig& cfg, const fs::path& out_dir) {
  const auto& s = cfg.simulation;
  const auto grid = time_grid(s);
  json report = envelope(cfg, "simulate");
  std::vector<fock::DensityMatrix> phonon_states;

  if (s.model == "effective") {
    const auto e = effective_setup(cfg);
    const int dim = s.phonon_levels;
    const auto a = fock::annihilation(dim);
    std::vector<dynamics::Jump> jumps;
    if (e.gamma > 0.0) jumps.push_back({a, e.gamma});
    if (e.gamma_phi > 0.0) jumps.push_back({a.adjoint() * a, 2.0 * e.gamma_phi});
    const auto spec = dynamics::LindbladSpec::constant(model::build_squeezed_kerr_hamiltonian(e.eff, dim), jumps);
    dynamics::EvolveOptions eo;
    eo.ode.rtol = s.rtol;
    eo.ode.atol = s.atol;
    phonon_states = dynamics::evolve_lindblad(fock::vacuum(dim), spec, grid, eo);
    report["effective"] = {{"detuning_khz", rad_per_us_to_khz(e.eff.detuning)},
                           {"epsilon_khz", io::complex_json(e.eff.epsilon * rad_per_us_to_khz(1.0))},
                           {"kerr_khz", rad_per_us_to_khz(e.eff.kerr)},
                           {"gamma_per_us", e.gamma},
                           {"gamma_phi_per_us", e.gamma_phi}};
  } else {
    full_model::Options opt;
    opt.dims = {s.qubit_levels, s.phonon_levels};
    opt.stark_shift = s.stark_shift;
    opt.decoherence = s.decoherence;
    opt.rtol = s.rtol;
    opt.atol = s.atol;
    auto drives = cfg.drive_params();
    json full;
    if (s.calibrate_delta && !cfg.drives.delta_correction) {
      const auto cal = full_model::calibrate_delta_correction(cfg.device, drives, opt);
      drives = model::DriveParams::symmetric(drives.xi1, drives.xi2, drives.delta_a, cal.delta_correction,
                                             cfg.drives.spacing, drives.phi);
      full["calibration"] = {{"delta_correction_khz", rad_per_us_to_khz(cal.delta_correction)},
                             {"residual_detuning_khz", rad_per_us_to_khz(cal.residual_detuning)},
                             {"iterations", cal.iterations}};
    }
    full["delta_correction_khz"] = rad_per_us_to_khz(drives.delta_correction);
    full["stark_shift_mhz"] = rad_per_us_to_mhz(model::stark_shift(cfg.device, drives));
    full["epsilon_formula_khz"] = rad_per_us_to_khz(std::abs(model::squeezing_rate(cfg.device, drives)));
    auto run = full_model::simulate(cfg.device, drives, grid, opt);
    full["qubit_excited_max"] = run.qubit_excited_max;
    std::vector<dynamics::VminSample> samples;
    for (std::size_t k = 0; k < grid.size(); ++k) samples.push_back({grid[k], run.stats[k].v_min, 0.0});
    try {
      const auto fit = dynamics::extract_squeezing_rate(samples);
      full["epsilon_fit_khz"] = rad_per_us_to_khz(fit.epsilon);
      full["epsilon_fit_error_khz"] = rad_per_us_to_khz(fit.epsilon_error);
      full["gamma_fit_per_us"] = fit.gamma;
    } catch (const std::exception& e) {
      full["epsilon_fit_khz"] = nullptr;
      full["epsilon_fit_message"] = e.what();
    }
    report["full"] = full;
    phonon_states = std::move(run.phonon_states);
  }

  std::vector<io::TrajectoryRow> rows;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto m = dynamics::phonon_moments(phonon_states[k]);
    auto st = dynamics::variances_from_moments(m);
    st.purity = phonon_states[k].purity();
    rows.push_back({grid[k], m, st});
  }
  io::write_text(out_dir / "trajectory.csv", io::trajectory_csv(rows));

  json snaps = json::array();
  for (double t : s.snapshot_times) {
    const auto k = nearest_index(grid, t);
    snaps.push_back(snapshot_json(phonon_states[k], grid[k], "wigner_t" + time_tag(grid[k]) + "us.csv", s, out_dir));
  }
  report["snapshots"] = snaps;
  report["final"] = snapshot_json(phonon_states.back(), grid.back(), "wigner_final.csv", s, out_dir);
  report["files"] = {"trajectory.csv"};
  write_json(out_dir / "summary.json", report);
  return report;
}

// ---------------------------------------------------------------------------
// sweep

namespace {

std::vector<std::string> sweep_metrics(const config::SweepConfig& sw) {
  if (sw.kind == "squeezing_rate") {
    std::vector<std::string> m = {"eps_formula_khz"};
    if (sw.simulate) {
      m.insert(m.end(), {"eps_simulated_khz", "eps_simulated_error_khz", "delta_calibrated_khz"});
    }
    return m;
  }
  if (sw.kind == "kerr") return {"kerr_perturbative_khz", "kerr_fourth_order_khz", "kerr_exact_khz"};
  if (sw.kind == "kerr_limit") return {"max_squeezing_dB", "t_opt_times_k", "truncation_rerun"};
  if (sw.kind == "decoherence_limit") return {"max_squeezing_dB", "t_opt_us"};
  return {"squeezing_dB", "v_measured"};
}

double axis_value(const config::SweepConfig& sw, const std::vector<double>& point, const std::string& name,
                  double fallback) {
  for (std::size_t k = 0; k < sw.axes.size(); ++k) {
    if (sw.axes[k].name == name) return point[k];
  }
  return fallback;
}

std::vector<double> sweep_point(const config::RunConfig& cfg, const std::vector<double>& point) {
  const auto& sw = *cfg.sweep;
  const double mhz = mhz_to_rad_per_us(1.0);
  if (sw.kind == "squeezing_rate") {
    const double p = axis_value(sw, point, "xi_product", 0.0);
    if (p < 0.0) throw std::invalid_argument("xi_product must be >= 0");
    const double da = axis_value(sw, point, "delta_a_mhz", rad_per_us_to_mhz(cfg.drives.delta_a)) * mhz;
    const double xi = std::sqrt(p);
    const double delta = cfg.drives.delta_correction.value_or(2.0 * cfg.device.g * cfg.device.g / da);
    const auto drives = model::DriveParams::symmetric(xi, xi, da, delta, cfg.drives.spacing, cfg.drives.phi);
    std::vector<double> out = {rad_per_us_to_khz(std::abs(model::squeezing_rate(cfg.device, drives)))};
    if (sw.simulate) {
      const auto& s = cfg.simulation;
      full_model::Options opt;
      opt.dims = {s.qubit_levels, s.phonon_levels};
      opt.stark_shift = s.stark_shift;
      opt.decoherence = s.decoherence;
      opt.rtol = s.rtol;
      opt.atol = s.atol;
      const auto ex = full_model::extract_epsilon(cfg.device, drives, tomography::linspace(0.0, s.t_max, s.n_times), opt);
      out.push_back(rad_per_us_to_khz(ex.epsilon_simulated));
      out.push_back(rad_per_us_to_khz(ex.epsilon_error));
      out.push_back(rad_per_us_to_khz(ex.calibration.delta_correction));
    }
    return out;
  }
  if (sw.kind == "kerr") {
    const double da = axis_value(sw, point, "delta_a_mhz", 0.0) * mhz;
    auto dev = cfg.device;
    dev.g = axis_value(sw, point, "g_mhz", rad_per_us_to_mhz(dev.g)) * mhz;
    return {rad_per_us_to_khz(model::kerr_perturbative(dev.g, da, dev.alpha)),
            rad_per_us_to_khz(model::kerr_fourth_order(dev.g, da, dev.alpha)),
            rad_per_us_to_khz(model::kerr_exact(dev, da, {4, 10}))};
  }
  if (sw.kind == "kerr_limit") {
    limits::KerrOptions ko;
    ko.dim = sw.kerr_dim;
    const auto pt = limits::kerr_limited_squeezing(axis_value(sw, point, "eps_over_k", 0.0), 1.0,
                                                   axis_value(sw, point, "gamma_over_k", 0.0), ko);
    return {pt.optimum.db, pt.optimum.t, pt.truncation_rerun ? 1.0 : 0.0};
  }
  if (sw.kind == "decoherence_limit") {
    const double eps = khz_to_rad_per_us(axis_value(sw, point, "epsilon_khz", 0.0));
    const double da = axis_value(sw, point, "delta_a_mhz", 0.0) * mhz;
    const auto pts = limits::max_squeezing_decoherence(eps, {da}, cfg.device, sw.p_e);
    return {pts.front().optimum.db, pts.front().optimum.t};
  }
  const auto m = limits::measurement_time_loss(axis_value(sw, point, "v0", 0.5), 1.0 / sw.decay_time,
                                               axis_value(sw, point, "t_meas_us", 0.0));
  return {m.db_measured, m.v_measured};
}

// FNV-1a, stable across platforms and runs.
std::string stable_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct PointResult {
  std::vector<double> values;
  std::string status = "ok";
};

std::optional<PointResult> load_cached(const fs::path& file, const std::string& key) {
  std::error_code ec;
  if (!fs::exists(file, ec)) return std::nullopt;
  try {
    const auto j = json::parse(io::read_text(file));
    if (j.at("key").get<std::string>() != key) return std::nullopt;
    PointResult r;
    for (const auto& v : j.at("values")) r.values.push_back(v.is_null() ? std::nan("") : v.get<double>());
    r.status = j.at("status").get<std::string>();
    if (r.status != "ok") return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

json cmd_sweep(const config::RunConfig& cfg, const fs::path& out_dir) {
  if (!cfg.sweep) throw ConfigError("sweep: configuration has no 'sweep' section");
  const auto& sw = *cfg.sweep;
  limits::SweepGrid grid;
  for (const auto& a : sw.axes) {
    grid.axes.push_back(a.name);
    grid.values.push_back(a.values);
  }
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto metrics = sweep_metrics(sw);

  json key_src = config::to_json(cfg);
  key_src.erase("workers");
  key_src.erase("seed");
  key_src["sweep"].erase("cache_dir");
  const std::string key = stable_hash(key_src.dump()) + "-" + kVersion;
  const fs::path cache = (sw.cache_dir.empty() ? out_dir / "cache" : sw.cache_dir) / (sw.kind + "-" + stable_hash(key));
  fs::create_directories(cache);

  const long n = static_cast<long>(grid.size());
  std::vector<PointResult> results(static_cast<std::size_t>(n));
  long reused = 0;
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(cfg)) reduction(+ : reused)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const fs::path file = cache / ("point_" + std::to_string(idx) + ".json");
    if (auto hit = load_cached(file, key)) {
      results[idx] = *hit;
      ++reused;
      continue;
    }
    PointResult r;
    try {
      r.values = sweep_point(cfg, grid.point(idx));
    } catch (const std::exception& e) {
      r.values.assign(metrics.size(), std::nan(""));
      r.status = std::string("failed: ") + e.what();
    }
    json j = {{"key", key}, {"point", grid.point(idx)}, {"status", r.status}};
    json vals = json::array();
    for (double v : r.values) vals.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    j["values"] = vals;
    try {
      write_json(file, j);
    } catch (const std::exception&) {
      // Cache writes are best effort; the result is still reported.
    }
    results[idx] = std::move(r);
  }

  std::vector<io::LongRow> rows;
  json failures = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto p = grid.point(i);
    for (std::size_t m = 0; m < metrics.size(); ++m) rows.push_back({p, metrics[m], results[i].values[m], results[i].status});
    if (results[i].status != "ok") failures.push_back({{"index", i}, {"point", p}, {"status", results[i].status}});
  }
  io::write_text(out_dir / "sweep.csv", io::long_csv(grid.axes, rows));
  json report = envelope(cfg, "sweep");
  report["points"] = n;
  report["metrics"] = metrics;
  report["failures"] = failures;
  report["files"] = {"sweep.csv"};
  write_json(out_dir / "sweep.json", report);
  if (reused > 0) std::cerr << "sweep: reused " << reused << " cached point(s)\n";
  return report;
}

// ---------------------------------------------------------------------------
// reconstruct

json cmd_reconstruct(const config::RunConfig& cfg, const fs::path& out_dir) {
  if (!cfg.tomography) throw ConfigError("reconstruct: configuration has no 'tomography' section");
  const auto& t = *cfg.tomography;
  const auto map = io::read_wigner_csv(t.wigner_csv);
  auto data = tomography::measurements_from_wigner(map);
  if (t.noise_sigma > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, t.noise_sigma);
    for (auto& m : data) m.parity = std::clamp(m.parity + noise(rng), -1.0, 1.0);
  }
  tomography::MleOptions mo;
  mo.max_iterations = t.max_iterations;
  mo.ll_rtol = t.ll_rtol;
  auto result = tomography::mle_reconstruct(data, t.truncation, mo);
  if (t.sensitivity_delta > 0) {
    result.truncation_sensitivity = tomography::truncation_sensitivity(data, result, t.sensitivity_delta, mo);
  }
  json report = envelope(cfg, "reconstruct");
  report["input"] = {{"file", t.wigner_csv.filename().generic_string()},
                     {"points", data.size()},
                     {"wigner_min", map.min()},
                     {"wigner_negative_volume", map.negative_volume()}};
  report["reconstruction"] = io::reconstruction_json(result);
  report["stats"] = io::stats_json(tomography::covariance_from_rho(result.rho));
  const auto q = tomography::qfi_max(result.rho);
  report["qfi_max"] = q.f_max;
  report["qfi_theta"] = q.theta;
  try {
    const auto g = tomography::gaussian_fit(map);
    report["gaussian_fit"] = io::stats_json(g.stats);
  } catch (const std::exception& e) {
    report["gaussian_fit"] = {{"error", e.what()}};
  }
  const RVector pops = result.rho.populations();
  double odd = 0.0;
  for (Eigen::Index k = 1; k < pops.size(); k += 2) odd += pops[k];
  report["odd_population"] = odd;
  write_json(out_dir / "reconstruction.json", report);
  return report;
}

// ---------------------------------------------------------------------------
// fit-duffing

json cmd_fit_duffing(const config::RunConfig& cfg, const fs::path& out_dir) {
  if (!cfg.duffing) throw ConfigError("fit-duffing: configuration has no 'duffing' section");
  const auto& d = *cfg.duffing;
  auto data = io::read_spectroscopy_csv(d.data_csv);
  data.delta_a = d.delta_a;
  data.g_a = d.g_a;
  data.infer();
  duffing::FitOptions fo;
  fo.branch = d.branch;
  fo.weight_width = d.weight_width;
  fo.weight_floor = d.weight_floor;
  const auto fit = duffing::fit_spectroscopy(data, d.init, fo);

  const double khz = rad_per_us_to_khz(1.0);
  const double mhz = rad_per_us_to_mhz(1.0);
  auto params_json = [&](const duffing::DuffingParams& p) {
    return json{{"alpha_m_khz", p.alpha_m * khz},
                {"kappa_khz", p.kappa * khz},
                {"omega_a_mhz", p.omega_a * mhz},
                {"omega_p_khz", p.omega_p_amp * khz}};
  };
  auto stage_json = [](const numerics::FitReport& r) {
    return json{{"iterations", r.iterations},
                {"residual_norm", r.residual_norm},
                {"converged", r.converged},
                {"message", r.message}};
  };
  json report = envelope(cfg, "fit-duffing");
  report["points"] = data.detunings.size();
  report["params"] = params_json(fit.params);
  report["errors"] = params_json(fit.errors);
  report["kerr_khz"] = 0.5 * fit.params.alpha_m * khz;
  report["critical_occupation"] = duffing::critical_occupation(fit.params.kappa, fit.params.alpha_m);
  report["stage1"] = stage_json(fit.stage1);
  report["stage2"] = stage_json(fit.stage2);

  std::string csv = "delta_p_MHz,n_data,n_fit\n";
  for (std::size_t i = 0; i < data.detunings.size(); ++i) {
    const double nf = duffing::branch_occupation(fit.params, data.detunings[i], d.branch);
    csv += io::format_double(data.detunings[i] * mhz) + "," + io::format_double(data.inferred_occupations[i]) +
           "," + io::format_double(nf) + "\n";
  }
  io::write_text(out_dir / "duffing_curve.csv", csv);
  report["files"] = {"duffing_curve.csv"};
  write_json(out_dir / "duffing_fit.json", report);
  return report;
}

// ---------------------------------------------------------------------------
// limits

json cmd_limits(const config::RunConfig& cfg, const fs::path& out_dir) {
  if (!cfg.limits) throw ConfigError("limits: configuration has no 'limits' section");
  const auto& l = *cfg.limits;
  json report = envelope(cfg, "limits");
  json files = json::array();

  if (l.decoherence) {
    const auto& c = *l.decoherence;
    limits::DecoherenceOptions o{c.purcell, c.inherited_dephasing};
    const auto pts = limits::max_squeezing_decoherence(c.epsilon, c.delta_a, cfg.device, c.p_e, o);
    std::vector<io::LongRow> rows;
    json best = nullptr;
    for (const auto& p : pts) {
      const std::vector<double> ax = {rad_per_us_to_mhz(p.delta_a)};
      rows.push_back({ax, "max_squeezing_dB", p.optimum.db});
      rows.push_back({ax, "t_opt_us", p.optimum.t});
      rows.push_back({ax, "gamma_per_us", p.gamma});
      rows.push_back({ax, "gamma_phi_per_us", p.gamma_phi});
      if (best.is_null() || p.optimum.db < best["max_squeezing_dB"].get<double>()) {
        best = {{"delta_a_mhz", ax[0]}, {"max_squeezing_dB", p.optimum.db}, {"t_opt_us", p.optimum.t}};
      }
    }
    io::write_text(out_dir / "decoherence_limit.csv", io::long_csv({"delta_a_mhz"}, rows));
    files.push_back("decoherence_limit.csv");
    report["decoherence"] = {{"best", best}};
  }

  if (l.kerr) {
    const auto& c = *l.kerr;
    limits::KerrOptions ko;
    ko.dim = c.dim;
    omp_set_num_threads(worker_count(cfg));
    const auto pts = limits::max_squeezing_kerr(c.eps_over_k, c.gamma_over_k, ko);
    std::vector<io::LongRow> rows;
    int violations = 0;
    const std::size_t ng = c.gamma_over_k.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::vector<double> ax = {c.eps_over_k[i / ng], c.gamma_over_k[i % ng]};
      rows.push_back({ax, "max_squeezing_dB", pts[i].optimum.db});
      rows.push_back({ax, "t_opt_times_k", pts[i].optimum.t});
      rows.push_back({ax, "truncation_rerun", pts[i].truncation_rerun ? 1.0 : 0.0});
    }
    // Squeezing may only weaken with stronger damping at fixed eps/K.
    for (std::size_t e = 0; e < c.eps_over_k.size(); ++e) {
      for (std::size_t g = 0; g + 1 < ng; ++g) {
        if (c.gamma_over_k[g + 1] > c.gamma_over_k[g] &&
            pts[e * ng + g + 1].optimum.db < pts[e * ng + g].optimum.db - 1e-6) {
          ++violations;
        }
      }
    }
    io::write_text(out_dir / "kerr_limit.csv", io::long_csv({"eps_over_k", "gamma_over_k"}, rows));
    files.push_back("kerr_limit.csv");
    report["kerr"] = {{"points", pts.size()}, {"monotonicity_violations", violations}};
  }

  if (l.measurement) {
    const auto& c = *l.measurement;
    std::vector<io::LongRow> rows;
    int violations = 0;
    double prev_v = -1.0;
    double prev_t = -1.0;
    for (double t : c.t_meas) {
      const auto m = limits::measurement_time_loss(c.v0, 1.0 / c.decay_time, t);
      rows.push_back({{t}, "squeezing_dB", m.db_measured});
      rows.push_back({{t}, "v_measured", m.v_measured});
      if (prev_t >= 0.0 && t > prev_t && std::abs(m.v_measured - 0.5) > std::abs(prev_v - 0.5) + 1e-12) ++violations;
      prev_v = m.v_measured;
      prev_t = t;
    }
    io::write_text(out_dir / "measurement_loss.csv", io::long_csv({"t_meas_us"}, rows));
    files.push_back("measurement_loss.csv");
    report["measurement"] = {{"db_initial", dynamics::to_db(c.v0)}, {"monotonicity_violations", violations}};
  }

  report["files"] = files;
  write_json(out_dir / "limits.json", report);
  return report;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e) ||
      dynamic_cast<const InvalidDimension*>(&e)) {
    return 2;
  }
  return 3;
}

json error_json(const std::string& command, const std::exception& e) {
  std::string kind = "numerical_failure";
  if (exit_code(e) == 2) {
    kind = "config_error";
  } else if (dynamic_cast<const SaturationError*>(&e)) {
    kind = "saturation_error";
  } else if (dynamic_cast<const FitFailure*>(&e)) {
    kind = "fit_failure";
  } else if (dynamic_cast<const IntegrationFailure*>(&e)) {
    kind = "integration_failure";
  }
  return {{"command", command}, {"version", kVersion}, {"error", kind}, {"message", e.what()}, {"exit_code", exit_code(e)}};
}

}  // namespace sklab::commands
