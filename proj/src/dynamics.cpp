#include "sklab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sklab::dynamics {

LindbladSpec LindbladSpec::constant(fock::Operator h, std::vector<Jump> jumps) {
  LindbladSpec s;
  s.hamiltonian.constant = std::move(h);
  s.jumps = std::move(jumps);
  return s;
}

namespace {

kernels::SparseC sparse(const CMatrix& m) { return m.sparseView(); }

}  // namespace

std::vector<fock::DensityMatrix> evolve_lindblad(const fock::DensityMatrix& rho0,
                                                 const LindbladSpec& spec,
                                                 std::span<const double> t_grid,
                                                 const EvolveOptions& opt,
                                                 numerics::OdeStats* stats) {
  if (!rho0.satisfies(opt.state_tolerance)) {
    throw std::invalid_argument("evolve_lindblad: initial state violates density-matrix invariants");
  }
  const Eigen::Index n = rho0.dim();
  if (!spec.hamiltonian_fn && spec.hamiltonian.constant.dim() != n) {
    throw DimensionMismatch("evolve_lindblad: Hamiltonian and state dimensions differ");
  }
  for (const auto& tone : spec.hamiltonian.tones) {
    if (tone.op.dim() != n) throw DimensionMismatch("evolve_lindblad: tone operator dimension");
  }

  kernels::LindbladTerms terms;
  CMatrix ldl = CMatrix::Zero(n, n);
  for (const auto& j : spec.jumps) {
    if (j.rate < 0.0) throw std::invalid_argument("evolve_lindblad: negative jump rate");
    if (j.op.dim() != n) throw DimensionMismatch("evolve_lindblad: jump operator dimension");
    if (j.rate == 0.0) continue;
    const CMatrix l = std::sqrt(j.rate) * j.op.matrix();
    terms.jumps.push_back(sparse(l));
    terms.jumps_adj.push_back(sparse(l.adjoint()));
    ldl.noalias() += l.adjoint() * l;
  }
  const CMatrix anti = cplx(0.0, -0.5) * ldl;

  std::vector<cplx> coeffs;
  if (spec.hamiltonian_fn) {
    terms.h_terms.push_back(sparse(anti));
    terms.h_terms.push_back(kernels::SparseC(n, n));
    coeffs = {1.0, 1.0};
  } else {
    terms.h_terms.push_back(sparse(spec.hamiltonian.constant.matrix() + anti));
    coeffs.push_back(1.0);
    for (const auto& tone : spec.hamiltonian.tones) {
      terms.h_terms.push_back(sparse(tone.op.matrix()));
      coeffs.push_back(tone.amplitude);
    }
    terms.finalize();
  }

  auto rhs = [&](double t, const CMatrix& rho) {
    if (spec.hamiltonian_fn) {
      terms.h_terms[1] = sparse(spec.hamiltonian_fn(t).matrix());
    } else {
      const auto& tones = spec.hamiltonian.tones;
      for (std::size_t k = 0; k < tones.size(); ++k) {
        coeffs[k + 1] = tones[k].amplitude * std::exp(cplx(0.0, -tones[k].frequency * t));
      }
    }
    CMatrix out;
    kernels::lindblad_rhs(opt.exec, terms, coeffs, rho, out);
    return out;
  };

  numerics::OdeOptions ode = opt.ode;
  const double fmax = spec.hamiltonian_fn ? 0.0 : spec.hamiltonian.max_frequency();
  if (fmax > 0.0) ode.h_max = std::min(ode.h_max, 1.0 / (opt.tone_step_factor * fmax));

  const auto states = numerics::ode_solve(rhs, CMatrix(rho0.matrix()), t_grid, ode, stats);

  std::vector<fock::DensityMatrix> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CMatrix& m = states[i];
    auto rho = fock::DensityMatrix::unchecked(m, rho0.modes());
    if (opt.check_invariants) {
      const auto d = rho.diagnostics();
      if (d.trace_error > opt.trace_tolerance ||
          d.hermiticity_error > opt.state_tolerance.hermiticity ||
          d.min_eigenvalue < opt.state_tolerance.min_eigenvalue) {
        std::ostringstream os;
        os << "evolve_lindblad: invariant violated at t = " << t_grid[i] << " (trace error "
           << d.trace_error << ", hermiticity error " << d.hermiticity_error
           << ", min eigenvalue " << d.min_eigenvalue << ")";
        throw IntegrationFailure(os.str());
      }
    }
    out.push_back(fock::DensityMatrix::unchecked(0.5 * (m + m.adjoint()), rho0.modes()));
  }
  return out;
}

Moments phonon_moments(const fock::DensityMatrix& rho) {
  const fock::DensityMatrix r = rho.modes().size() == 2 ? rho.phonon_reduced() : rho;
  const CMatrix& m = r.matrix();
  const Eigen::Index d = m.rows();
  Moments out;
  // <a> = sum_n sqrt(n) rho_{n, n-1}, <a^2> = sum_n sqrt(n (n-1)) rho_{n, n-2}.
  for (Eigen::Index k = 1; k < d; ++k) {
    out.mean_a += std::sqrt(static_cast<double>(k)) * m(k, k - 1);
    out.mean_n += static_cast<double>(k) * m(k, k).real();
    if (k >= 2) out.mean_aa += std::sqrt(static_cast<double>(k * (k - 1))) * m(k, k - 2);
  }
  return out;
}

MomentTrajectory moment_evolution(double delta, cplx epsilon, double gamma, double gamma_phi,
                                  const Moments& init, std::span<const double> t_grid) {
  if (gamma < 0.0 || gamma_phi < 0.0) {
    throw std::invalid_argument("moment_evolution: rates must be nonnegative");
  }
  const cplx i(0.0, 1.0);
  const cplx e = epsilon;
  const cplx ec = std::conj(epsilon);
  const double k1 = 0.5 * (gamma + 2.0 * gamma_phi);
  const double k2 = gamma + 4.0 * gamma_phi;

  // z = (<a>, <a^dag>, <n>, <aa>, <a^dag a^dag>, 1).
  CMatrix a = CMatrix::Zero(6, 6);
  a(0, 0) = -i * delta - k1;
  a(0, 1) = -2.0 * i * e;
  a(1, 0) = 2.0 * i * ec;
  a(1, 1) = i * delta - k1;
  a(2, 2) = -gamma;
  a(2, 3) = 2.0 * i * ec;
  a(2, 4) = -2.0 * i * e;
  a(3, 2) = -4.0 * i * e;
  a(3, 3) = -2.0 * i * delta - k2;
  a(3, 5) = -2.0 * i * e;
  a(4, 2) = 4.0 * i * ec;
  a(4, 4) = 2.0 * i * delta - k2;
  a(4, 5) = 2.0 * i * ec;

  CVector z0(6);
  z0 << init.mean_a, std::conj(init.mean_a), init.mean_n, init.mean_aa, std::conj(init.mean_aa), 1.0;

  MomentTrajectory traj;
  if (t_grid.empty()) return traj;
  const double t0 = t_grid.front();
  for (double t : t_grid) {
    const CVector z = numerics::expm(CMatrix(a * (t - t0))) * z0;
    traj.times.push_back(t);
    traj.mean_a.push_back(z[0]);
    traj.mean_n.push_back(z[2].real());
    traj.mean_aa.push_back(z[3]);
  }
  return traj;
}

QuadratureStats variances_from_moments(const Moments& m) {
  const double nt = m.mean_n - std::norm(m.mean_a);
  const cplx c = m.mean_aa - m.mean_a * m.mean_a;
  QuadratureStats s;
  s.v_min = 0.5 * (1.0 + 2.0 * nt - 2.0 * std::abs(c));
  s.v_max = 0.5 * (1.0 + 2.0 * nt + 2.0 * std::abs(c));
  const double prod = s.v_min * s.v_max;
  if (!(prod >= 0.25 - 1e-6)) {
    std::ostringstream os;
    os << "variances_from_moments: uncertainty relation violated, V_min V_max = " << prod;
    throw NumericalFailure(os.str());
  }
  // Var(X cos t + P sin t) = (1 + 2 nt + 2|c| cos(arg c - 2t))/2.
  double angle = 0.5 * (std::arg(c) + kPi);
  angle = std::fmod(angle, kPi);
  if (angle < 0.0) angle += kPi;
  s.angle = angle;
  const double root = std::sqrt(std::max(prod, 0.25));
  s.n_thermal = root - 0.5;
  s.purity = 1.0 / (2.0 * root);
  return s;
}

namespace {

// (1 - e^{-x})/x, continuous at 0.
double one_minus_exp_over(double x) {
  if (std::abs(x) < 1e-12) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

}  // namespace

VariancePair closed_form_squeezing(double epsilon, double gamma, double t) {
  VariancePair v;
  const double plus = gamma + 4.0 * epsilon;
  const double minus = gamma - 4.0 * epsilon;
  v.v_min = 0.5 - 2.0 * epsilon * t * one_minus_exp_over(plus * t);
  v.v_max = 0.5 + 2.0 * epsilon * t * one_minus_exp_over(minus * t);
  v.singular_limit = std::abs(minus) <= 1e-12 * std::max(std::abs(gamma), 4.0 * std::abs(epsilon));
  return v;
}

VariancePair free_decay_variances(double v0, double gamma, double gamma_phi, double t) {
  if (!(v0 > 0.0 && v0 <= 0.5)) throw std::invalid_argument("free_decay_variances: v0 outside (0, 1/2]");
  const double r = -std::log(2.0 * v0) / 4.0;
  const double pre = 0.5 * std::exp(-2.0 * t * (gamma + 2.0 * gamma_phi));
  const double a = std::exp(t * (gamma + 4.0 * gamma_phi)) * (std::exp(gamma * t) + std::cosh(4.0 * r) - 1.0);
  const double b = std::exp(gamma * t) * std::sinh(4.0 * r);
  return {pre * (a - b), pre * (a + b), false};
}

namespace {

struct Prepared {
  std::vector<double> ts, vs, sig;
  double t_scale = 1.0;
};

Prepared prepare(std::span<const VminSample> samples, const char* who) {
  if (samples.size() < 4) throw std::invalid_argument(std::string(who) + ": need at least 4 samples");
  Prepared p;
  p.t_scale = 0.0;
  bool weighted = true;
  for (const auto& s : samples) {
    if (!std::isfinite(s.t) || !std::isfinite(s.v_min)) {
      throw std::invalid_argument(std::string(who) + ": non-finite sample");
    }
    if (!(s.v_min > 0.0 && s.v_min < 0.55)) {
      throw std::invalid_argument(std::string(who) + ": V_min outside (0, 1/2]");
    }
    p.ts.push_back(s.t);
    p.vs.push_back(s.v_min);
    p.sig.push_back(s.sigma);
    weighted = weighted && s.sigma > 0.0;
    p.t_scale = std::max(p.t_scale, std::abs(s.t));
  }
  if (!(p.t_scale > 0.0)) p.t_scale = 1.0;
  for (double& t : p.ts) t /= p.t_scale;
  if (!weighted) p.sig.clear();
  return p;
}

numerics::FitReport best_of(const std::vector<RVector>& starts, const numerics::CurveModel& model,
                            const Prepared& p, const numerics::LsqOptions& opt) {
  numerics::FitReport best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    auto rep = numerics::curve_fit(model, s, p.ts, p.vs, p.sig, opt);
    if (rep.residual_norm < best_norm) {
      best_norm = rep.residual_norm;
      best = std::move(rep);
    }
  }
  return best;
}

}  // namespace

SqueezingRateFit extract_squeezing_rate(std::span<const VminSample> samples) {
  const Prepared p = prepare(samples, "extract_squeezing_rate");

  // Dimensionless parameters (eps T, gamma T) with T the largest sample time.
  numerics::CurveModel model = [](double tau, const RVector& q) {
    return closed_form_squeezing(q[0], q[1], tau).v_min;
  };
  double eps0 = 0.0;
  for (std::size_t k = 0; k < p.ts.size(); ++k) {
    if (p.ts[k] > 0.0) eps0 = std::max(eps0, (0.5 - p.vs[k]) / (2.0 * p.ts[k]));
  }
  std::vector<RVector> starts;
  for (double g0 : {0.01, 0.3, 1.0, 3.0, 10.0}) starts.push_back((RVector(2) << std::max(eps0, 1e-3), g0).finished());

  numerics::LsqOptions opt;
  opt.bounds = numerics::Bounds{RVector::Zero(2), RVector::Constant(2, 1e6)};
  const auto rep = best_of(starts, model, p, opt);
  if (!rep.converged) throw FitFailure("extract_squeezing_rate: " + rep.message);

  SqueezingRateFit out;
  out.epsilon = rep.parameters[0] / p.t_scale;
  out.gamma = rep.parameters[1] / p.t_scale;
  out.covariance = rep.covariance / (p.t_scale * p.t_scale);
  out.epsilon_error = std::sqrt(std::max(out.covariance(0, 0), 0.0));
  out.gamma_error = std::sqrt(std::max(out.covariance(1, 1), 0.0));
  out.report = rep;
  return out;
}

DecayFit fit_squeezing_decay(std::span<const VminSample> samples) {
  const Prepared p = prepare(samples, "fit_squeezing_decay");
  numerics::CurveModel model = [](double tau, const RVector& q) {
    return 0.5 * (1.0 + std::exp(-q[1] * tau) * (2.0 * q[0] - 1.0));
  };
  std::vector<RVector> starts;
  for (double g0 : {0.1, 1.0, 5.0}) starts.push_back((RVector(2) << 0.3, g0).finished());
  numerics::LsqOptions opt;
  opt.bounds = numerics::Bounds{(RVector(2) << 1e-9, 0.0).finished(), (RVector(2) << 1.0, 1e6).finished()};
  const auto rep = best_of(starts, model, p, opt);
  if (!rep.converged) throw FitFailure("fit_squeezing_decay: " + rep.message);

  DecayFit out;
  out.v0 = rep.parameters[0];
  out.gamma = rep.parameters[1] / p.t_scale;
  out.v0_error = rep.errors[0];
  out.gamma_error = rep.errors[1] / p.t_scale;
  out.report = rep;
  return out;
}

double to_db(double variance) { return 10.0 * std::log10(variance / kVacuumVariance); }

}  // namespace sklab::dynamics
