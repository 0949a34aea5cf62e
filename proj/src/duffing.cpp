#include "sklab/duffing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sklab::duffing {

void DuffingParams::validate() const {
  if (!std::isfinite(alpha_m) || !std::isfinite(omega_a)) {
    throw std::invalid_argument("DuffingParams: non-finite value");
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("DuffingParams: kappa must be positive");
  if (!(omega_p_amp >= 0.0)) throw std::invalid_argument("DuffingParams: omega_p_amp must be >= 0");
}

std::vector<numerics::RealRoot> steady_state_occupation(const DuffingParams& p, double delta_p) {
  p.validate();
  const double a = p.alpha_m;
  const auto roots = numerics::cubic_roots(a * a, -2.0 * delta_p * a,
                                           delta_p * delta_p + 0.25 * p.kappa * p.kappa,
                                           -p.omega_p_amp * p.omega_p_amp);
  std::vector<numerics::RealRoot> out;
  for (const auto& r : roots.real) {
    if (r.value >= 0.0) out.push_back(r);
  }
  return out;
}

double branch_occupation(const DuffingParams& p, double omega_p, Branch branch) {
  const auto roots = steady_state_occupation(p, omega_p - p.omega_a);
  if (roots.empty()) throw NumericalFailure("branch_occupation: no nonnegative root");
  return branch == Branch::lowest ? roots.front().value : roots.back().value;
}

double cubic_discriminant(const DuffingParams& p, double delta_p) {
  const double a = p.alpha_m * p.alpha_m;
  const double b = -2.0 * delta_p * p.alpha_m;
  const double c = delta_p * delta_p + 0.25 * p.kappa * p.kappa;
  const double d = -p.omega_p_amp * p.omega_p_amp;
  return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c -
         27.0 * a * a * d * d;
}

double qubit_population(double n_bar, double delta_a, double g_a) {
  const double om2 = g_a * g_a * n_bar;
  return 2.0 * om2 / (delta_a * delta_a + 4.0 * om2);
}

double infer_phonon_population(double p_e, double delta_a, double g_a) {
  if (p_e < 0.0) throw std::invalid_argument("infer_phonon_population: p_e must be >= 0");
  if (p_e >= 0.5) throw SaturationError("infer_phonon_population: p_e >= 1/2 cannot be inverted");
  if (g_a == 0.0) throw SingularParameter("infer_phonon_population: g_a = 0");
  return p_e * delta_a * delta_a / (g_a * g_a * (2.0 - 4.0 * p_e));
}

std::optional<std::pair<double, double>> bifurcation_points(double alpha_m, double kappa,
                                                            double n_bar) {
  if (alpha_m == 0.0) throw SingularParameter("bifurcation_points: alpha_m = 0");
  const double disc = 4.0 * alpha_m * alpha_m * n_bar * n_bar - kappa * kappa;
  if (disc < 0.0) return std::nullopt;
  const double half = 0.5 * std::sqrt(disc);
  const double centre = 2.0 * alpha_m * n_bar;
  return std::make_pair(centre - half, centre + half);
}

double critical_occupation(double kappa, double alpha_m) {
  if (alpha_m == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(kappa / (std::sqrt(3.0) * alpha_m));
}

void SpectroscopyDataset::infer() {
  inferred_occupations.clear();
  inferred_occupations.reserve(qubit_populations.size());
  for (double pe : qubit_populations) inferred_occupations.push_back(infer_phonon_population(pe, delta_a, g_a));
}

DuffingFit fit_spectroscopy(const SpectroscopyDataset& data, const DuffingParams& init,
                            const FitOptions& opt) {
  const std::size_t n = data.detunings.size();
  if (n < 6) throw std::invalid_argument("fit_spectroscopy: need at least 6 points");
  if (data.inferred_occupations.size() != n) {
    throw std::invalid_argument("fit_spectroscopy: occupations missing or size mismatch");
  }
  if (!(init.kappa > 0.0)) throw std::invalid_argument("fit_spectroscopy: init.kappa must be positive");

  // Work in units of the initial linewidth; occupations are scale invariant.
  const double s = init.kappa;
  std::vector<double> x(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = data.detunings[i] / s;
    const double z = (data.detunings[i] - init.omega_a) / (opt.weight_width * init.kappa);
    w[i] = std::sqrt(std::max(opt.weight_floor, std::exp(-0.5 * z * z)));
  }
  const auto& y = data.inferred_occupations;

  auto residuals = [&](double am, double k, double wa, double om) {
    RVector r(static_cast<Eigen::Index>(n));
    const DuffingParams p{am, k, wa, om};
    for (std::size_t i = 0; i < n; ++i) {
      r[static_cast<Eigen::Index>(i)] = w[i] * (branch_occupation(p, x[i], opt.branch) - y[i]);
    }
    return r;
  };

  const double wa0 = init.omega_a / s;
  numerics::LsqOptions lsq;
  lsq.bounds = numerics::Bounds{(RVector(3) << -1e9, 1e-9, 0.0).finished(),
                                (RVector(3) << 1e9, 1e9, 1e9).finished()};
  const RVector p1 = (RVector(3) << init.alpha_m / s, 1.0, init.omega_p_amp / s).finished();
  DuffingFit out;
  out.stage1 = numerics::least_squares(
      [&](const RVector& q) { return residuals(q[0], q[1], wa0, q[2]); }, p1, lsq);
  if (!out.stage1.converged) throw FitFailure("fit_spectroscopy stage 1: " + out.stage1.message);

  lsq.bounds = numerics::Bounds{(RVector(4) << -1e9, 1e-9, -1e12, 0.0).finished(),
                                (RVector(4) << 1e9, 1e9, 1e12, 1e9).finished()};
  const RVector& q1 = out.stage1.parameters;
  const RVector p2 = (RVector(4) << q1[0], q1[1], wa0, q1[2]).finished();
  out.stage2 = numerics::least_squares(
      [&](const RVector& q) { return residuals(q[0], q[1], q[2], q[3]); }, p2, lsq);
  if (!out.stage2.converged) throw FitFailure("fit_spectroscopy stage 2: " + out.stage2.message);

  const RVector& q = out.stage2.parameters;
  const RVector& e = out.stage2.errors;
  out.params = {q[0] * s, q[1] * s, q[2] * s, q[3] * s};
  out.errors = {e[0] * s, e[1] * s, e[2] * s, e[3] * s};
  return out;
}

}  // namespace sklab::duffing
