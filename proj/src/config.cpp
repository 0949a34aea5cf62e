#include "sklab/config.hpp"

#include "sklab/io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace sklab::config {

namespace {

using nlohmann::json;

struct Ctx {
  std::string source;
  std::filesystem::path base_dir;
};

[[noreturn]] void fail(const Ctx& ctx, const YAML::Node& node, const std::string& field,
                       const std::string& msg) {
  std::string where = ctx.source;
  const auto mark = node.Mark();
  if (mark.line >= 0) where += ":" + std::to_string(mark.line + 1);
  throw ConfigError(where + ": " + field + ": " + msg);
}

void check_keys(const Ctx& ctx, const YAML::Node& node, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(ctx, node, path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(ctx, kv.first, path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <typename T>
T scalar(const Ctx& ctx, const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(ctx, node, field, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(ctx, node, field, "cannot parse '" + node.Scalar() + "'");
  }
}

double number(const Ctx& ctx, const YAML::Node& node, const std::string& field) {
  const double v = scalar<double>(ctx, node, field);
  if (!std::isfinite(v)) fail(ctx, node, field, "must be finite");
  return v;
}

template <typename T>
void opt(const Ctx& ctx, const YAML::Node& parent, const std::string& path, const char* key, T& out) {
  const auto n = parent[key];
  if (!n) return;
  if constexpr (std::is_same_v<T, double>) {
    out = number(ctx, n, path + "." + key);
  } else {
    out = scalar<T>(ctx, n, path + "." + key);
  }
}

double positive(const Ctx& ctx, const YAML::Node& parent, const std::string& path, const char* key,
                double dflt) {
  double v = dflt;
  opt(ctx, parent, path, key, v);
  if (parent[key] && !(v > 0.0)) fail(ctx, parent[key], path + "." + key, "must be positive");
  return v;
}

std::vector<double> number_list(const Ctx& ctx, const YAML::Node& node, const std::string& field) {
  std::vector<double> out;
  if (node.IsSequence()) {
    for (const auto& v : node) out.push_back(number(ctx, v, field));
  } else if (node.IsMap()) {
    check_keys(ctx, node, field, {"start", "stop", "num", "log"});
    if (!node["start"] || !node["stop"] || !node["num"]) fail(ctx, node, field, "range needs start, stop, num");
    const double a = number(ctx, node["start"], field + ".start");
    const double b = number(ctx, node["stop"], field + ".stop");
    const int n = scalar<int>(ctx, node["num"], field + ".num");
    bool log = false;
    opt(ctx, node, field, "log", log);
    if (n < 1) fail(ctx, node["num"], field + ".num", "must be >= 1");
    if (log && !(a > 0.0 && b > 0.0)) fail(ctx, node, field, "log range needs positive bounds");
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      out.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
  } else {
    out.push_back(number(ctx, node, field));
  }
  if (out.empty()) fail(ctx, node, field, "empty list");
  return out;
}

std::filesystem::path path_of(const Ctx& ctx, const YAML::Node& node, const std::string& field) {
  std::filesystem::path p = scalar<std::string>(ctx, node, field);
  return p.is_absolute() ? p : ctx.base_dir / p;
}

void parse_device(const Ctx& ctx, const YAML::Node& n, model::DeviceParams& d) {
  check_keys(ctx, n, "device",
             {"omega_q_mhz", "omega_a_mhz", "alpha_mhz", "g_mhz", "t1_qubit_us", "t2_qubit_us",
              "t1_phonon_us", "t2_phonon_us"});
  auto mhz = [&](const char* key, double& out) {
    if (n[key]) out = mhz_to_rad_per_us(number(ctx, n[key], std::string("device.") + key));
  };
  mhz("omega_q_mhz", d.omega_q);
  mhz("omega_a_mhz", d.omega_a);
  mhz("alpha_mhz", d.alpha);
  mhz("g_mhz", d.g);
  opt(ctx, n, "device", "t1_qubit_us", d.t1_qubit);
  opt(ctx, n, "device", "t2_qubit_us", d.t2_qubit);
  opt(ctx, n, "device", "t1_phonon_us", d.t1_phonon);
  opt(ctx, n, "device", "t2_phonon_us", d.t2_phonon);
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    fail(ctx, n, "device", e.what());
  }
}

void parse_drives(const Ctx& ctx, const YAML::Node& n, DriveConfig& d) {
  check_keys(ctx, n, "drives", {"xi1", "xi2", "delta_a_mhz", "spacing_mhz", "phi", "delta_correction_mhz"});
  opt(ctx, n, "drives", "xi1", d.xi1);
  opt(ctx, n, "drives", "xi2", d.xi2);
  opt(ctx, n, "drives", "phi", d.phi);
  if (n["delta_a_mhz"]) d.delta_a = mhz_to_rad_per_us(number(ctx, n["delta_a_mhz"], "drives.delta_a_mhz"));
  if (n["spacing_mhz"]) d.spacing = mhz_to_rad_per_us(number(ctx, n["spacing_mhz"], "drives.spacing_mhz"));
  if (n["delta_correction_mhz"]) {
    d.delta_correction =
        mhz_to_rad_per_us(number(ctx, n["delta_correction_mhz"], "drives.delta_correction_mhz"));
  }
  if (d.delta_a == 0.0) fail(ctx, n, "drives.delta_a_mhz", "must be nonzero");
  if (std::abs(d.xi1) >= 1.0 || std::abs(d.xi2) >= 1.0) fail(ctx, n, "drives", "|xi| must be < 1");
}

void parse_simulation(const Ctx& ctx, const YAML::Node& n, SimulationConfig& s) {
  const std::string p = "simulation";
  check_keys(ctx, n, p,
             {"model", "qubit_levels", "phonon_levels", "rtol", "atol", "t_max_us", "n_times",
              "snapshot_times_us", "wigner_extent", "wigner_points", "wigner_rotation_deg", "derive",
              "detuning_khz", "epsilon_khz", "epsilon_phase", "kerr_khz", "decay_time_us",
              "dephasing_time_us", "inherited_dephasing", "p_e", "calibrate_delta", "stark_shift",
              "decoherence"});
  opt(ctx, n, p, "model", s.model);
  if (s.model != "effective" && s.model != "full") fail(ctx, n["model"], p + ".model", "must be 'effective' or 'full'");
  opt(ctx, n, p, "qubit_levels", s.qubit_levels);
  opt(ctx, n, p, "phonon_levels", s.phonon_levels);
  if (s.qubit_levels < 2) fail(ctx, n, p + ".qubit_levels", "must be >= 2");
  if (s.phonon_levels < 4) fail(ctx, n, p + ".phonon_levels", "must be >= 4");
  s.rtol = positive(ctx, n, p, "rtol", s.rtol);
  s.atol = positive(ctx, n, p, "atol", s.atol);
  s.t_max = positive(ctx, n, p, "t_max_us", s.t_max);
  opt(ctx, n, p, "n_times", s.n_times);
  if (s.n_times < 2) fail(ctx, n, p + ".n_times", "must be >= 2");
  if (n["snapshot_times_us"]) {
    s.snapshot_times = number_list(ctx, n["snapshot_times_us"], p + ".snapshot_times_us");
    for (double t : s.snapshot_times) {
      if (t < 0.0 || t > s.t_max) fail(ctx, n["snapshot_times_us"], p + ".snapshot_times_us", "outside [0, t_max_us]");
    }
  }
  s.wigner_extent = positive(ctx, n, p, "wigner_extent", s.wigner_extent);
  opt(ctx, n, p, "wigner_points", s.wigner_points);
  if (s.wigner_points < 2) fail(ctx, n, p + ".wigner_points", "must be >= 2");
  if (n["wigner_rotation_deg"]) {
    s.wigner_rotation = number(ctx, n["wigner_rotation_deg"], p + ".wigner_rotation_deg") * kPi / 180.0;
  }
  opt(ctx, n, p, "derive", s.derive);
  auto khz = [&](const char* key, double& out) {
    if (n[key]) out = khz_to_rad_per_us(number(ctx, n[key], p + "." + key));
  };
  khz("detuning_khz", s.detuning);
  khz("epsilon_khz", s.epsilon);
  khz("kerr_khz", s.kerr);
  opt(ctx, n, p, "epsilon_phase", s.epsilon_phase);
  opt(ctx, n, p, "decay_time_us", s.decay_time);
  opt(ctx, n, p, "dephasing_time_us", s.dephasing_time);
  if (s.decay_time < 0.0) fail(ctx, n["decay_time_us"], p + ".decay_time_us", "must be >= 0");
  if (s.dephasing_time < 0.0) fail(ctx, n["dephasing_time_us"], p + ".dephasing_time_us", "must be >= 0");
  opt(ctx, n, p, "inherited_dephasing", s.inherited_dephasing);
  opt(ctx, n, p, "p_e", s.p_e);
  if (s.p_e < 0.0 || s.p_e > 1.0) fail(ctx, n["p_e"], p + ".p_e", "must be in [0, 1]");
  opt(ctx, n, p, "calibrate_delta", s.calibrate_delta);
  opt(ctx, n, p, "stark_shift", s.stark_shift);
  opt(ctx, n, p, "decoherence", s.decoherence);
}

TomographyConfig parse_tomography(const Ctx& ctx, const YAML::Node& n) {
  const std::string p = "tomography";
  check_keys(ctx, n, p, {"wigner_csv", "truncation", "sensitivity_delta", "noise_sigma", "max_iterations", "ll_rtol"});
  TomographyConfig t;
  if (!n["wigner_csv"]) fail(ctx, n, p + ".wigner_csv", "required");
  t.wigner_csv = path_of(ctx, n["wigner_csv"], p + ".wigner_csv");
  opt(ctx, n, p, "truncation", t.truncation);
  opt(ctx, n, p, "sensitivity_delta", t.sensitivity_delta);
  opt(ctx, n, p, "noise_sigma", t.noise_sigma);
  opt(ctx, n, p, "max_iterations", t.max_iterations);
  t.ll_rtol = positive(ctx, n, p, "ll_rtol", t.ll_rtol);
  if (t.truncation < 2) fail(ctx, n, p + ".truncation", "must be >= 2");
  if (t.sensitivity_delta < 0 || t.sensitivity_delta >= t.truncation - 1) {
    fail(ctx, n, p + ".sensitivity_delta", "must be in [0, truncation - 2]");
  }
  if (t.noise_sigma < 0.0) fail(ctx, n, p + ".noise_sigma", "must be >= 0");
  if (t.max_iterations < 1) fail(ctx, n, p + ".max_iterations", "must be >= 1");
  return t;
}

const std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>>& sweep_kinds() {
  // kind -> (required axes, optional axes)
  static const std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> k = {
      {"squeezing_rate", {{"xi_product"}, {"delta_a_mhz"}}},
      {"kerr", {{"delta_a_mhz"}, {"g_mhz"}}},
      {"kerr_limit", {{"eps_over_k", "gamma_over_k"}, {}}},
      {"decoherence_limit", {{"epsilon_khz", "delta_a_mhz"}, {}}},
      {"measurement_loss", {{"v0", "t_meas_us"}, {}}},
  };
  return k;
}

SweepConfig parse_sweep(const Ctx& ctx, const YAML::Node& n) {
  const std::string p = "sweep";
  check_keys(ctx, n, p, {"kind", "axes", "simulate", "decay_time_us", "p_e", "kerr_dim", "cache_dir"});
  SweepConfig s;
  if (!n["kind"]) fail(ctx, n, p + ".kind", "required");
  s.kind = scalar<std::string>(ctx, n["kind"], p + ".kind");
  const auto it = sweep_kinds().find(s.kind);
  if (it == sweep_kinds().end()) fail(ctx, n["kind"], p + ".kind", "unknown sweep kind '" + s.kind + "'");
  const auto& [required, optional] = it->second;

  if (!n["axes"]) fail(ctx, n, p + ".axes", "required");
  const auto axes = n["axes"];
  if (!axes.IsMap()) fail(ctx, axes, p + ".axes", "expected a mapping of axis name to values");
  for (const auto& kv : axes) {
    const auto name = kv.first.as<std::string>();
    const bool known = std::count(required.begin(), required.end(), name) ||
                       std::count(optional.begin(), optional.end(), name);
    if (!known) fail(ctx, kv.first, p + ".axes." + name, "not an axis of sweep kind '" + s.kind + "'");
    if (kv.second.IsSequence() && kv.second.size() == 0) fail(ctx, kv.second, p + ".axes." + name, "empty axis");
    s.axes.push_back({name, number_list(ctx, kv.second, p + ".axes." + name)});
  }
  for (const auto& r : required) {
    const bool present = std::any_of(s.axes.begin(), s.axes.end(), [&](const SweepAxis& a) { return a.name == r; });
    if (!present) fail(ctx, axes, p + ".axes." + r, "required for sweep kind '" + s.kind + "'");
  }
  opt(ctx, n, p, "simulate", s.simulate);
  s.decay_time = positive(ctx, n, p, "decay_time_us", s.decay_time);
  opt(ctx, n, p, "p_e", s.p_e);
  opt(ctx, n, p, "kerr_dim", s.kerr_dim);
  if (s.kerr_dim < 4) fail(ctx, n["kerr_dim"], p + ".kerr_dim", "must be >= 4");
  if (n["cache_dir"]) s.cache_dir = path_of(ctx, n["cache_dir"], p + ".cache_dir");
  return s;
}

DuffingConfig parse_duffing(const Ctx& ctx, const YAML::Node& n) {
  const std::string p = "duffing";
  check_keys(ctx, n, p, {"data_csv", "delta_a_mhz", "g_mhz", "init", "branch", "weight_width", "weight_floor"});
  DuffingConfig d;
  for (const char* key : {"data_csv", "delta_a_mhz", "g_mhz", "init"}) {
    if (!n[key]) fail(ctx, n, p + "." + key, "required");
  }
  d.data_csv = path_of(ctx, n["data_csv"], p + ".data_csv");
  d.delta_a = mhz_to_rad_per_us(number(ctx, n["delta_a_mhz"], p + ".delta_a_mhz"));
  d.g_a = mhz_to_rad_per_us(number(ctx, n["g_mhz"], p + ".g_mhz"));
  const auto init = n["init"];
  check_keys(ctx, init, p + ".init", {"alpha_m_khz", "kappa_khz", "omega_a_mhz", "omega_p_khz"});
  for (const char* key : {"alpha_m_khz", "kappa_khz", "omega_a_mhz", "omega_p_khz"}) {
    if (!init[key]) fail(ctx, init, p + ".init." + key, "required");
  }
  d.init.alpha_m = khz_to_rad_per_us(number(ctx, init["alpha_m_khz"], p + ".init.alpha_m_khz"));
  d.init.kappa = khz_to_rad_per_us(number(ctx, init["kappa_khz"], p + ".init.kappa_khz"));
  d.init.omega_a = mhz_to_rad_per_us(number(ctx, init["omega_a_mhz"], p + ".init.omega_a_mhz"));
  d.init.omega_p_amp = khz_to_rad_per_us(number(ctx, init["omega_p_khz"], p + ".init.omega_p_khz"));
  if (!(d.init.kappa > 0.0)) fail(ctx, init["kappa_khz"], p + ".init.kappa_khz", "must be positive");
  if (n["branch"]) {
    const auto b = scalar<std::string>(ctx, n["branch"], p + ".branch");
    if (b == "lowest") {
      d.branch = duffing::Branch::lowest;
    } else if (b == "highest") {
      d.branch = duffing::Branch::highest;
    } else {
      fail(ctx, n["branch"], p + ".branch", "must be 'lowest' or 'highest'");
    }
  }
  d.weight_width = positive(ctx, n, p, "weight_width", d.weight_width);
  opt(ctx, n, p, "weight_floor", d.weight_floor);
  if (d.weight_floor < 0.0 || d.weight_floor > 1.0) fail(ctx, n["weight_floor"], p + ".weight_floor", "must be in [0, 1]");
  return d;
}

LimitsConfig parse_limits(const Ctx& ctx, const YAML::Node& n) {
  const std::string p = "limits";
  check_keys(ctx, n, p, {"decoherence", "kerr", "measurement"});
  LimitsConfig l;
  if (const auto d = n["decoherence"]) {
    const std::string q = p + ".decoherence";
    check_keys(ctx, d, q, {"epsilon_khz", "delta_a_mhz", "p_e", "purcell", "inherited_dephasing"});
    DecoherenceLimitConfig c;
    if (!d["epsilon_khz"] || !d["delta_a_mhz"]) fail(ctx, d, q, "needs epsilon_khz and delta_a_mhz");
    c.epsilon = khz_to_rad_per_us(number(ctx, d["epsilon_khz"], q + ".epsilon_khz"));
    for (double v : number_list(ctx, d["delta_a_mhz"], q + ".delta_a_mhz")) {
      if (v == 0.0) fail(ctx, d["delta_a_mhz"], q + ".delta_a_mhz", "must be nonzero");
      c.delta_a.push_back(mhz_to_rad_per_us(v));
    }
    opt(ctx, d, q, "p_e", c.p_e);
    opt(ctx, d, q, "purcell", c.purcell);
    opt(ctx, d, q, "inherited_dephasing", c.inherited_dephasing);
    l.decoherence = c;
  }
  if (const auto k = n["kerr"]) {
    const std::string q = p + ".kerr";
    check_keys(ctx, k, q, {"eps_over_k", "gamma_over_k", "dim"});
    KerrLimitConfig c;
    if (!k["eps_over_k"] || !k["gamma_over_k"]) fail(ctx, k, q, "needs eps_over_k and gamma_over_k");
    c.eps_over_k = number_list(ctx, k["eps_over_k"], q + ".eps_over_k");
    c.gamma_over_k = number_list(ctx, k["gamma_over_k"], q + ".gamma_over_k");
    opt(ctx, k, q, "dim", c.dim);
    if (c.dim < 4) fail(ctx, k["dim"], q + ".dim", "must be >= 4");
    l.kerr = c;
  }
  if (const auto m = n["measurement"]) {
    const std::string q = p + ".measurement";
    check_keys(ctx, m, q, {"v0", "decay_time_us", "t_meas_us"});
    MeasurementLossConfig c;
    if (!m["t_meas_us"]) fail(ctx, m, q + ".t_meas_us", "required");
    opt(ctx, m, q, "v0", c.v0);
    c.decay_time = positive(ctx, m, q, "decay_time_us", c.decay_time);
    c.t_meas = number_list(ctx, m["t_meas_us"], q + ".t_meas_us");
    if (!(c.v0 > 0.0)) fail(ctx, m["v0"], q + ".v0", "must be positive");
    l.measurement = c;
  }
  return l;
}

}  // namespace

model::DriveParams RunConfig::drive_params() const {
  const double delta = drives.delta_correction.value_or(2.0 * device.g * device.g / drives.delta_a);
  return model::DriveParams::symmetric(drives.xi1, drives.xi2, drives.delta_a, delta, drives.spacing,
                                       drives.phi);
}

RunConfig parse_config(const std::string& yaml, const std::filesystem::path& base_dir,
                       const std::string& source) {
  const Ctx ctx{source, base_dir};
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  if (!root || root.IsNull()) return cfg;
  check_keys(ctx, root, "",
             {"seed", "workers", "device", "drives", "simulation", "tomography", "sweep", "duffing", "limits"});
  if (root["seed"]) {
    const auto s = scalar<long long>(ctx, root["seed"], "seed");
    if (s < 0) fail(ctx, root["seed"], "seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  opt(ctx, root, "", "workers", cfg.workers);
  if (cfg.workers < 0) fail(ctx, root["workers"], "workers", "must be >= 0");
  if (root["device"]) parse_device(ctx, root["device"], cfg.device);
  if (root["drives"]) parse_drives(ctx, root["drives"], cfg.drives);
  if (root["simulation"]) parse_simulation(ctx, root["simulation"], cfg.simulation);
  if (root["tomography"]) cfg.tomography = parse_tomography(ctx, root["tomography"]);
  if (root["sweep"]) cfg.sweep = parse_sweep(ctx, root["sweep"]);
  if (root["duffing"]) cfg.duffing = parse_duffing(ctx, root["duffing"]);
  if (root["limits"]) cfg.limits = parse_limits(ctx, root["limits"]);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  const auto text = io::read_text(path);
  return parse_config(text, path.parent_path(), path.string());
}

namespace {

std::vector<double> scaled(const std::vector<double>& v, double f) {
  std::vector<double> out(v);
  for (double& x : out) x *= f;
  return out;
}

}  // namespace

json to_json(const RunConfig& c) {
  const double mhz = rad_per_us_to_mhz(1.0);
  const double khz = rad_per_us_to_khz(1.0);
  json j;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  const auto& d = c.device;
  j["device"] = {{"omega_q_mhz", d.omega_q * mhz}, {"omega_a_mhz", d.omega_a * mhz},
                 {"alpha_mhz", d.alpha * mhz},     {"g_mhz", d.g * mhz},
                 {"t1_qubit_us", d.t1_qubit},       {"t2_qubit_us", d.t2_qubit},
                 {"t1_phonon_us", d.t1_phonon},     {"t2_phonon_us", d.t2_phonon}};
  const auto dp = c.drive_params();
  j["drives"] = {{"xi1", c.drives.xi1},
                 {"xi2", c.drives.xi2},
                 {"delta_a_mhz", c.drives.delta_a * mhz},
                 {"spacing_mhz", c.drives.spacing * mhz},
                 {"phi", c.drives.phi},
                 {"delta_correction_mhz", dp.delta_correction * mhz},
                 {"delta_correction_given", c.drives.delta_correction.has_value()}};
  const auto& s = c.simulation;
  j["simulation"] = {{"model", s.model},
                     {"qubit_levels", s.qubit_levels},
                     {"phonon_levels", s.phonon_levels},
                     {"rtol", s.rtol},
                     {"atol", s.atol},
                     {"t_max_us", s.t_max},
                     {"n_times", s.n_times},
                     {"snapshot_times_us", s.snapshot_times},
                     {"wigner_extent", s.wigner_extent},
                     {"wigner_points", s.wigner_points},
                     {"wigner_rotation_deg", s.wigner_rotation * 180.0 / kPi},
                     {"derive", s.derive},
                     {"detuning_khz", s.detuning * khz},
                     {"epsilon_khz", s.epsilon * khz},
                     {"epsilon_phase", s.epsilon_phase},
                     {"kerr_khz", s.kerr * khz},
                     {"decay_time_us", s.decay_time},
                     {"dephasing_time_us", s.dephasing_time},
                     {"inherited_dephasing", s.inherited_dephasing},
                     {"p_e", s.p_e},
                     {"calibrate_delta", s.calibrate_delta},
                     {"stark_shift", s.stark_shift},
                     {"decoherence", s.decoherence}};
  if (c.tomography) {
    const auto& t = *c.tomography;
    j["tomography"] = {{"wigner_csv", t.wigner_csv.generic_string()},
                       {"truncation", t.truncation},
                       {"sensitivity_delta", t.sensitivity_delta},
                       {"noise_sigma", t.noise_sigma},
                       {"max_iterations", t.max_iterations},
                       {"ll_rtol", t.ll_rtol}};
  }
  if (c.sweep) {
    const auto& sw = *c.sweep;
    json axes = json::array();
    for (const auto& a : sw.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
    j["sweep"] = {{"kind", sw.kind},         {"axes", axes},   {"simulate", sw.simulate},
                  {"decay_time_us", sw.decay_time}, {"p_e", sw.p_e}, {"kerr_dim", sw.kerr_dim},
                  {"cache_dir", sw.cache_dir.generic_string()}};
  }
  if (c.duffing) {
    const auto& f = *c.duffing;
    j["duffing"] = {{"data_csv", f.data_csv.generic_string()},
                    {"delta_a_mhz", f.delta_a * mhz},
                    {"g_mhz", f.g_a * mhz},
                    {"init",
                     {{"alpha_m_khz", f.init.alpha_m * khz},
                      {"kappa_khz", f.init.kappa * khz},
                      {"omega_a_mhz", f.init.omega_a * mhz},
                      {"omega_p_khz", f.init.omega_p_amp * khz}}},
                    {"branch", f.branch == duffing::Branch::lowest ? "lowest" : "highest"},
                    {"weight_width", f.weight_width},
                    {"weight_floor", f.weight_floor}};
  }
  if (c.limits) {
    json l = json::object();
    if (c.limits->decoherence) {
      const auto& x = *c.limits->decoherence;
      l["decoherence"] = {{"epsilon_khz", x.epsilon * khz},
                          {"delta_a_mhz", scaled(x.delta_a, mhz)},
                          {"p_e", x.p_e},
                          {"purcell", x.purcell},
                          {"inherited_dephasing", x.inherited_dephasing}};
    }
    if (c.limits->kerr) {
      const auto& x = *c.limits->kerr;
      l["kerr"] = {{"eps_over_k", x.eps_over_k}, {"gamma_over_k", x.gamma_over_k}, {"dim", x.dim}};
    }
    if (c.limits->measurement) {
      const auto& x = *c.limits->measurement;
      l["measurement"] = {{"v0", x.v0}, {"decay_time_us", x.decay_time}, {"t_meas_us", x.t_meas}};
    }
    j["limits"] = l;
  }
  return j;
}

}  // namespace sklab::config
