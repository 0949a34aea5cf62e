#include "sklab/limits.hpp"

#include "sklab/numerics.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

namespace sklab::limits {

void SweepGrid::validate() const {
  if (axes.empty()) throw std::invalid_argument("sweep grid: no axes");
  if (axes.size() != values.size()) throw std::invalid_argument("sweep grid: axes/values mismatch");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (values[i].empty()) throw std::invalid_argument("sweep grid: empty axis '" + axes[i] + "'");
    for (double v : values[i]) {
      if (!std::isfinite(v)) throw std::invalid_argument("sweep grid: non-finite value on '" + axes[i] + "'");
    }
  }
}

std::size_t SweepGrid::size() const {
  std::size_t n = 1;
  for (const auto& v : values) n *= v.size();
  return values.empty() ? 0 : n;
}

std::vector<std::size_t> SweepGrid::index(std::size_t flat) const {
  std::vector<std::size_t> idx(values.size());
  for (std::size_t k = values.size(); k-- > 0;) {
    idx[k] = flat % values[k].size();
    flat /= values[k].size();
  }
  return idx;
}

std::vector<double> SweepGrid::point(std::size_t flat) const {
  const auto idx = index(flat);
  std::vector<double> p(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) p[k] = values[k][idx[k]];
  return p;
}

TimeOptimum minimize_over_time(const std::function<double(double)>& v_min, double epsilon,
                               double gamma) {
  double scale = 0.0;
  if (epsilon > 0.0) scale = std::max(scale, 1.0 / epsilon);
  if (gamma > 0.0) scale = std::max(scale, 1.0 / gamma);
  TimeOptimum out;
  if (scale == 0.0) return out;
  const double lo = 1e-3 * scale;
  const double hi = 10.0 * scale;
  const auto m = numerics::scan_then_refine_log(v_min, lo, hi, 60, 1e-8);
  out.t = m.x;
  out.v_min = m.value;
  out.db = dynamics::to_db(m.value);
  out.at_horizon = m.x >= hi * (1.0 - 1e-6);
  return out;
}

std::vector<DecoherencePoint> max_squeezing_decoherence(double epsilon,
                                                        const std::vector<double>& delta_a_grid,
                                                        const model::DeviceParams& device,
                                                        double p_e,
                                                        const DecoherenceOptions& opt) {
  std::vector<DecoherencePoint> out;
  out.reserve(delta_a_grid.size());
  for (double da : delta_a_grid) {
    DecoherencePoint pt;
    pt.delta_a = da;
    pt.gamma = device.gamma_phonon();
    if (opt.purcell) pt.gamma += (device.g * device.g) / (da * da) * device.gamma_qubit();
    pt.gamma_phi = device.gamma_phi_phonon();
    if (opt.inherited_dephasing) pt.gamma_phi += model::inherited_dephasing(p_e, device, da);
    auto v = [&](double t) {
      const double grid[2] = {0.0, t};
      const auto traj = dynamics::moment_evolution(0.0, epsilon, pt.gamma, pt.gamma_phi, {}, grid);
      return dynamics::variances_from_moments(traj.at(1)).v_min;
    };
    pt.optimum = minimize_over_time(v, epsilon, pt.gamma);
    out.push_back(pt);
  }
  return out;
}

namespace {

std::vector<double> uniform_grid(double a, double b, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1.0);
  return g;
}

KerrPoint kerr_run(double epsilon, double kerr, double gamma, int dim, const KerrOptions& opt) {
  KerrPoint pt;
  pt.dim_used = dim;
  double scale = 0.0;
  if (epsilon > 0.0) scale = std::max(scale, 1.0 / epsilon);
  if (gamma > 0.0) scale = std::max(scale, 1.0 / gamma);
  if (scale == 0.0) return pt;
  const double horizon = 10.0 * scale;

  const auto a = fock::annihilation(dim);
  const auto ad = a.adjoint();
  const fock::Operator h = epsilon * (a * a + ad * ad) - kerr * (ad * ad * a * a);
  const auto spec = dynamics::LindbladSpec::constant(h, {{a, gamma}});
  dynamics::EvolveOptions eo;
  eo.exec = opt.exec;

  const auto grid = uniform_grid(0.0, horizon, opt.coarse_points + 1);
  const auto states = dynamics::evolve_lindblad(fock::vacuum(dim), spec, grid, eo);
  std::size_t best = 0;
  double best_v = 0.5;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double v = dynamics::variances_from_moments(dynamics::phonon_moments(states[k])).v_min;
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  double tail = 0.0;
  for (std::size_t k = 0; k <= best; ++k) {
    const RVector pop = states[k].populations();
    tail = std::max(tail, pop[dim - 1] + pop[dim - 2]);
  }
  pt.tail_population = tail;

  if (best > 0) {
    const std::size_t lo = best - 1;
    const std::size_t hi = std::min(best + 1, states.size() - 1);
    auto v_at = [&](double t) {
      if (t <= grid[lo]) return dynamics::variances_from_moments(dynamics::phonon_moments(states[lo])).v_min;
      const double g2[2] = {grid[lo], t};
      const auto s = dynamics::evolve_lindblad(states[lo], spec, g2, eo);
      return dynamics::variances_from_moments(dynamics::phonon_moments(s[1])).v_min;
    };
    const auto m = numerics::golden_section(v_at, grid[lo], grid[hi], 1e-6 * horizon);
    if (m.value < best_v) {
      pt.optimum.t = m.x;
      pt.optimum.v_min = m.value;
    } else {
      pt.optimum.t = grid[best];
      pt.optimum.v_min = best_v;
    }
  } else {
    pt.optimum.t = 0.0;
    pt.optimum.v_min = best_v;
  }
  pt.optimum.db = dynamics::to_db(pt.optimum.v_min);
  pt.optimum.at_horizon = best + 1 == states.size();
  return pt;
}

}  // namespace

KerrPoint kerr_limited_squeezing(double epsilon, double kerr, double gamma, const KerrOptions& opt) {
  if (epsilon < 0.0 || kerr < 0.0 || gamma < 0.0) {
    throw std::invalid_argument("kerr_limited_squeezing: parameters must be nonnegative");
  }
  KerrPoint pt = kerr_run(epsilon, kerr, gamma, opt.dim, opt);
  if (pt.tail_population > opt.tail_tolerance) {
    const int bigger = opt.dim + opt.dim / 2;
    pt = kerr_run(epsilon, kerr, gamma, bigger, opt);
    pt.truncation_rerun = true;
  }
  if (kerr > 0.0) {
    pt.eps_over_k = epsilon / kerr;
    pt.gamma_over_k = gamma / kerr;
  }
  return pt;
}

std::vector<KerrPoint> max_squeezing_kerr(const std::vector<double>& eps_over_k,
                                          const std::vector<double>& gamma_over_k,
                                          const KerrOptions& opt) {
  for (double v : eps_over_k) {
    if (!(v > 0.0)) throw std::invalid_argument("max_squeezing_kerr: eps/K must be positive");
  }
  for (double v : gamma_over_k) {
    if (!(v > 0.0)) throw std::invalid_argument("max_squeezing_kerr: gamma/K must be positive");
  }
  const long ne = static_cast<long>(eps_over_k.size());
  const long ng = static_cast<long>(gamma_over_k.size());
  std::vector<KerrPoint> out(static_cast<std::size_t>(ne * ng));
  KerrOptions inner = opt;
  inner.exec = kernels::Exec::serial;
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (long idx = 0; idx < ne * ng; ++idx) {
    try {
      out[static_cast<std::size_t>(idx)] =
          kerr_limited_squeezing(eps_over_k[idx / ng], 1.0, gamma_over_k[idx % ng], inner);
    } catch (...) {
#pragma omp critical(sklab_kerr_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

MeasurementLoss measurement_time_loss(double v0, double gamma, double t_meas) {
  if (t_meas < 0.0) throw std::invalid_argument("measurement_time_loss: t_meas must be >= 0");
  MeasurementLoss m;
  m.v_initial = v0;
  m.v_measured = dynamics::free_decay_variances(v0, gamma, 0.0, t_meas).v_min;
  m.db_initial = dynamics::to_db(v0);
  m.db_measured = dynamics::to_db(m.v_measured);
  return m;
}

}  // namespace sklab::limits
