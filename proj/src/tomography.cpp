#include "sklab/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sklab::tomography {

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1.0);
  return v;
}

namespace {

double spacing(const std::vector<double>& g) {
  return g.size() > 1 ? (g.back() - g.front()) / (g.size() - 1.0) : 1.0;
}

void check_grid(std::span<const double> g, const char* name) {
  if (g.empty()) throw std::invalid_argument(std::string("wigner: empty ") + name + " grid");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i] > g[i - 1])) {
      throw std::invalid_argument(std::string("wigner: ") + name + " grid not strictly increasing");
    }
  }
}

}  // namespace

double WignerMap::integral() const { return values.sum() * spacing(xs) * spacing(ps); }

double WignerMap::negative_volume() const {
  return -values.cwiseMin(0.0).sum() * spacing(xs) * spacing(ps);
}

WignerMap wigner(const fock::DensityMatrix& rho, std::span<const double> xs,
                 std::span<const double> ps, kernels::Exec exec,
                 std::vector<std::string>* warnings) {
  if (rho.modes().size() != 1) throw DimensionMismatch("wigner: single-mode state expected");
  check_grid(xs, "x");
  check_grid(ps, "p");
  const int dim = static_cast<int>(rho.dim());
  if (warnings) {
    int unsafe = 0;
    for (double x : xs) {
      for (double p : ps) {
        if (!fock::displacement_is_safe(cplx(x, p) / std::sqrt(2.0), dim)) ++unsafe;
      }
    }
    if (unsafe > 0) {
      std::ostringstream os;
      os << "wigner: " << unsafe << " grid points exceed |alpha|^2 <= dim/4 for dim " << dim;
      warnings->push_back(os.str());
    }
  }
  WignerMap map;
  map.xs.assign(xs.begin(), xs.end());
  map.ps.assign(ps.begin(), ps.end());
  map.values = exec == kernels::Exec::parallel ? kernels::wigner_grid_parallel(rho.matrix(), xs, ps)
                                               : kernels::wigner_grid_serial(rho.matrix(), xs, ps);
  return map;
}

namespace {

dynamics::QuadratureStats stats_from_variances(double vmin, double vmax, double angle) {
  dynamics::QuadratureStats s;
  s.v_min = vmin;
  s.v_max = vmax;
  s.angle = angle;
  const double root = std::sqrt(std::max(vmin * vmax, 0.0));
  s.n_thermal = root - 0.5;
  s.purity = root > 0.0 ? 1.0 / (2.0 * root) : 0.0;
  return s;
}

}  // namespace

GaussianFit gaussian_fit(const WignerMap& map) {
  const std::size_t nx = map.xs.size();
  const std::size_t np = map.ps.size();
  if (nx * np < 25) throw std::invalid_argument("gaussian_fit: need at least 25 grid points");
  if (map.values.maxCoeff() <= 0.0) throw std::invalid_argument("gaussian_fit: no positive values");

  // Start from the moments of the positive part.
  double wsum = 0.0, mx = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double w = std::max(map.values(i, j), 0.0);
      wsum += w;
      mx += w * map.xs[i];
      mp += w * map.ps[j];
    }
  }
  mx /= wsum;
  mp /= wsum;
  double cxx = 0.0, cpp = 0.0, cxp = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double w = std::max(map.values(i, j), 0.0);
      const double dx = map.xs[i] - mx;
      const double dp = map.ps[j] - mp;
      cxx += w * dx * dx;
      cpp += w * dp * dp;
      cxp += w * dx * dp;
    }
  }
  cxx /= wsum;
  cpp /= wsum;
  cxp /= wsum;

  RVector p0(6);
  p0 << map.values.maxCoeff(), mx, mp, std::max(cxx, 1e-3), std::max(cpp, 1e-3), cxp;

  auto model_at = [](double x, double p, const RVector& q) {
    const double det = q[3] * q[4] - q[5] * q[5];
    if (!(det > 1e-12)) return 10.0;
    const double dx = x - q[1];
    const double dp = p - q[2];
    const double quad = (q[4] * dx * dx - 2.0 * q[5] * dx * dp + q[3] * dp * dp) / det;
    return q[0] * std::exp(-0.5 * quad);
  };
  numerics::ResidualFn res = [&](const RVector& q) {
    RVector r(static_cast<Eigen::Index>(nx * np));
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < np; ++j) {
        r[static_cast<Eigen::Index>(i * np + j)] = model_at(map.xs[i], map.ps[j], q) - map.values(i, j);
      }
    }
    return r;
  };
  numerics::LsqOptions opt;
  RVector lo(6), hi(6);
  lo << -1.0, -1e3, -1e3, 1e-6, 1e-6, -1e3;
  hi << 1.0, 1e3, 1e3, 1e3, 1e3, 1e3;
  opt.bounds = numerics::Bounds{lo, hi};
  auto rep = numerics::least_squares(res, p0, opt);
  if (!rep.converged) throw FitFailure("gaussian_fit: " + rep.message);

  const RVector& q = rep.parameters;
  Eigen::Matrix2d cov;
  cov << q[3], q[5], q[5], q[4];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  if (!(es.eigenvalues()[0] > 0.0)) throw FitFailure("gaussian_fit: covariance not positive definite");

  GaussianFit out;
  out.amplitude = q[0];
  out.mean << q[1], q[2];
  out.covariance = cov;
  const Eigen::Vector2d minor = es.eigenvectors().col(0);
  double angle = std::atan2(minor[1], minor[0]);
  if (angle < 0.0) angle += kPi;
  if (angle >= kPi) angle -= kPi;
  out.stats = stats_from_variances(es.eigenvalues()[0], es.eigenvalues()[1], angle);
  out.report = std::move(rep);
  return out;
}

std::vector<ParityMeasurement> simulate_parity_measurements(const fock::DensityMatrix& rho,
                                                            std::span<const cplx> alphas,
                                                            double noise_sigma,
                                                            std::uint64_t seed) {
  if (rho.modes().size() != 1) throw DimensionMismatch("simulate_parity_measurements: single mode");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<ParityMeasurement> out;
  out.reserve(alphas.size());
  for (const cplx& a : alphas) {
    double p = kernels::displaced_parity_expectation(rho.matrix(), a);
    if (noise_sigma > 0.0) p = std::clamp(p + noise_sigma * noise(rng), -1.0, 1.0);
    out.push_back({a, p});
  }
  return out;
}

std::vector<ParityMeasurement> measurements_from_wigner(const WignerMap& map) {
  std::vector<ParityMeasurement> out;
  for (std::size_t i = 0; i < map.xs.size(); ++i) {
    for (std::size_t j = 0; j < map.ps.size(); ++j) {
      const double p = std::clamp(kPi * map.values(i, j), -1.0, 1.0);
      out.push_back({cplx(map.xs[i], map.ps[j]) / std::sqrt(2.0), p});
    }
  }
  return out;
}

namespace {

struct MleProblem {
  std::vector<CMatrix> pis;
  RVector f_plus;
  RVector f_minus;
  kernels::Exec exec;

  RVector parities(const CMatrix& rho) const {
    return exec == kernels::Exec::parallel ? kernels::expectations_parallel(rho, pis)
                                           : kernels::expectations_serial(rho, pis);
  }

  double ll(const RVector& e) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < e.size(); ++k) {
      const double qp = std::max(0.5 * (1.0 + e[k]), 1e-300);
      const double qm = std::max(0.5 * (1.0 - e[k]), 1e-300);
      if (f_plus[k] > 0.0) s += f_plus[k] * std::log(qp);
      if (f_minus[k] > 0.0) s += f_minus[k] * std::log(qm);
    }
    return s;
  }

  CMatrix r_operator(const RVector& e) const {
    const Eigen::Index n = e.size();
    RVector c1(n);
    double c0 = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double qp = std::max(0.5 * (1.0 + e[k]), 1e-300);
      const double qm = std::max(0.5 * (1.0 - e[k]), 1e-300);
      const double a = f_plus[k] / qp;
      const double b = f_minus[k] / qm;
      c0 += 0.5 * (a + b);
      c1[k] = 0.5 * (a - b) / static_cast<double>(n);
    }
    CMatrix r = exec == kernels::Exec::parallel ? kernels::weighted_sum_parallel(pis, c1)
                                                : kernels::weighted_sum_serial(pis, c1);
    r.diagonal().array() += c0 / static_cast<double>(n);
    return r;
  }
};

MleProblem make_problem(std::span<const ParityMeasurement> m, int truncation, kernels::Exec exec) {
  MleProblem p;
  p.exec = exec;
  const Eigen::Index n = static_cast<Eigen::Index>(m.size());
  p.f_plus.resize(n);
  p.f_minus.resize(n);
  p.pis.reserve(m.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const double par = std::clamp(m[static_cast<std::size_t>(k)].parity, -1.0, 1.0);
    p.f_plus[k] = 0.5 * (1.0 + par);
    p.f_minus[k] = 0.5 * (1.0 - par);
    p.pis.push_back(kernels::displaced_parity(m[static_cast<std::size_t>(k)].alpha, truncation));
  }
  return p;
}

CMatrix normalized_sandwich(const CMatrix& r, const CMatrix& rho) {
  CMatrix out = r * rho * r.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return out / out.trace().real();
}

}  // namespace

double log_likelihood(std::span<const ParityMeasurement> measurements, const CMatrix& rho) {
  const auto p = make_problem(measurements, static_cast<int>(rho.rows()), kernels::Exec::serial);
  return p.ll(p.parities(rho));
}

ReconstructionResult mle_reconstruct(std::span<const ParityMeasurement> measurements,
                                     int truncation, const MleOptions& opt) {
  if (truncation < 2) throw InvalidDimension("mle_reconstruct: truncation must be >= 2");
  if (measurements.empty()) throw std::invalid_argument("mle_reconstruct: no measurements");
  const auto prob = make_problem(measurements, truncation, opt.exec);

  ReconstructionResult res;
  res.truncation = truncation;
  if (measurements.size() < static_cast<std::size_t>(truncation) * truncation) {
    res.message = "fewer measurement settings than truncation^2; ";
  }

  const Eigen::Index n = truncation;
  CMatrix rho = CMatrix::Identity(n, n) / static_cast<double>(n);
  double ll = prob.ll(prob.parities(rho));
  // Each step is R^beta rho R^beta with beta doubled from 1 while the likelihood rises.
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const CMatrix r = prob.r_operator(prob.parities(rho));
    CMatrix cand = normalized_sandwich(r, rho);
    double ll_c = prob.ll(prob.parities(cand));
    if (ll_c >= ll && opt.max_over_relaxation > 1.0) {
      const Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
      const RVector w = es.eigenvalues().cwiseMax(0.0) / std::max(es.eigenvalues().maxCoeff(), 1e-300);
      for (double beta = 2.0; beta <= opt.max_over_relaxation; beta *= 2.0) {
        const RVector wb = w.array().pow(beta).matrix();
        CMatrix next = normalized_sandwich(es.eigenvectors() * wb.asDiagonal() * es.eigenvectors().adjoint(), rho);
        const double ll_n = prob.ll(prob.parities(next));
        if (!(ll_n > ll_c)) break;
        cand = std::move(next);
        ll_c = ll_n;
      }
    }
    if (ll_c < ll) {
      // Diluted step (I + e R) rho (I + e R) / norm, e halved until ascent.
      bool ascended = false;
      for (double e = 0.5; e > 1e-8; e *= 0.5) {
        const CMatrix m = CMatrix::Identity(n, n) + e * r;
        cand = normalized_sandwich(m, rho);
        ll_c = prob.ll(prob.parities(cand));
        if (ll_c >= ll) {
          ascended = true;
          break;
        }
      }
      if (!ascended) {
        res.converged = true;
        res.message += "stopped: no ascent step found";
        break;
      }
    }
    const double rel = std::abs(ll_c - ll) / std::max(std::abs(ll), 1e-300);
    rho = cand;
    ll = ll_c;
    if (rel < opt.ll_rtol) {
      res.converged = true;
      res.message += "converged: relative log-likelihood change below tolerance";
      ++it;
      break;
    }
  }
  if (!res.converged) res.message += "iteration limit reached";
  res.iterations = it;
  res.rho = fock::DensityMatrix::unchecked(rho, fock::ModeDims{truncation}).projected();
  res.log_likelihood = prob.ll(prob.parities(res.rho.matrix()));
  return res;
}

TruncationSensitivity truncation_sensitivity(std::span<const ParityMeasurement> measurements,
                                             const ReconstructionResult& central, int delta,
                                             const MleOptions& opt) {
  TruncationSensitivity s;
  for (int t : {central.truncation - delta, central.truncation, central.truncation + delta}) {
    if (t < 2) continue;
    const fock::DensityMatrix rho =
        t == central.truncation ? central.rho : mle_reconstruct(measurements, t, opt).rho;
    s.truncations.push_back(t);
    s.v_min.push_back(covariance_from_rho(rho).v_min);
  }
  const auto [lo, hi] = std::minmax_element(s.v_min.begin(), s.v_min.end());
  s.v_min_spread = 0.5 * (*hi - *lo);
  return s;
}

dynamics::QuadratureStats covariance_from_rho(const fock::DensityMatrix& rho) {
  return dynamics::variances_from_moments(dynamics::phonon_moments(rho));
}

fock::Operator qfi_generator(int dim, double theta) {
  return std::sin(theta) * fock::quadrature_x(dim) + std::cos(theta) * fock::quadrature_p(dim);
}

double qfi(const fock::DensityMatrix& rho, double theta, double cutoff) {
  if (rho.modes().size() != 1) throw DimensionMismatch("qfi: single-mode state expected");
  const CMatrix h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  const auto eig = numerics::hermitian_eig(h);
  const CMatrix a = eig.vectors.adjoint() * qfi_generator(static_cast<int>(rho.dim()), theta).matrix() *
                    eig.vectors;
  const RVector& lam = eig.values;
  double f = 0.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    for (Eigen::Index l = 0; l < lam.size(); ++l) {
      const double s = lam[k] + lam[l];
      if (s <= cutoff) continue;
      const double d = lam[k] - lam[l];
      f += d * d / s * std::norm(a(k, l));
    }
  }
  return 2.0 * f;
}

QfiMax qfi_max(const fock::DensityMatrix& rho) {
  constexpr int kScan = 180;
  const double step = kPi / kScan;
  int best = 0;
  double best_f = -1.0;
  for (int i = 0; i < kScan; ++i) {
    const double f = qfi(rho, i * step);
    if (f > best_f) {
      best_f = f;
      best = i;
    }
  }
  const double centre = best * step;
  const auto m = numerics::golden_section([&](double th) { return -qfi(rho, th); }, centre - step,
                                          centre + step, 1e-4);
  QfiMax out;
  if (-m.value > best_f) {
    out.f_max = -m.value;
    out.theta = std::fmod(m.x + kPi, kPi);
  } else {
    out.f_max = best_f;
    out.theta = centre;
  }
  return out;
}

}  // namespace sklab::tomography
