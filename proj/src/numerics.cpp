#include "sklab/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <array>

namespace sklab::numerics {

namespace {

RVector clamp_to(const RVector& p, const std::optional<Bounds>& b) {
  if (!b) return p;
  return p.cwiseMax(b->lower).cwiseMin(b->upper);
}

}  // namespace

RMatrix numerical_jacobian(const ResidualFn& r, const RVector& p, double rel_step,
                           const std::optional<Bounds>& bounds) {
  const RVector r0 = r(p);
  RMatrix jac(r0.size(), p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = rel_step * std::max(std::abs(p[j]), 1.0);
    double lo = p[j] - h;
    double hi = p[j] + h;
    if (bounds) {
      lo = std::max(lo, bounds->lower[j]);
      hi = std::min(hi, bounds->upper[j]);
    }
    RVector pl = p, ph = p;
    pl[j] = lo;
    ph[j] = hi;
    const double span = hi - lo;
    if (span <= 0.0) {
      jac.col(j).setZero();
      continue;
    }
    if (lo == p[j]) {
      jac.col(j) = (r(ph) - r0) / span;
    } else if (hi == p[j]) {
      jac.col(j) = (r0 - r(pl)) / span;
    } else {
      jac.col(j) = (r(ph) - r(pl)) / span;
    }
  }
  return jac;
}

FitReport least_squares(const ResidualFn& residuals, const RVector& p0, const LsqOptions& opt) {
  const Eigen::Index n = p0.size();
  if (opt.bounds) {
    if (opt.bounds->lower.size() != n || opt.bounds->upper.size() != n) {
      throw std::invalid_argument("least_squares: bounds size mismatch");
    }
  }

  FitReport rep;
  RVector p = clamp_to(p0, opt.bounds);
  RVector r = residuals(p);
  const Eigen::Index m = r.size();
  if (m < n) throw std::invalid_argument("least_squares: fewer residuals than parameters");
  if (!r.allFinite()) throw FitFailure("least_squares: residuals not finite at start point");

  double cost = r.squaredNorm();
  double lambda = 1e-3;
  double nu = 2.0;
  RMatrix jac = numerical_jacobian(residuals, p, opt.jacobian_step, opt.bounds);

  for (rep.iterations = 0; rep.iterations < opt.max_iterations; ++rep.iterations) {
    const RMatrix jtj = jac.transpose() * jac;
    const RVector grad = jac.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() < opt.gradient_tol) {
      rep.converged = true;
      rep.message = "gradient below tolerance";
      break;
    }
    if (cost == 0.0) {
      rep.converged = true;
      rep.message = "zero residual";
      break;
    }

    bool accepted = false;
    bool stop = false;
    while (!accepted) {
      RMatrix a = jtj;
      for (Eigen::Index i = 0; i < n; ++i) a(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      Eigen::LDLT<RMatrix> ldlt(a);
      RVector step;
      if (ldlt.info() == Eigen::Success) step = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        lambda *= 10.0;
        if (lambda > 1e20) throw FitFailure("least_squares: singular normal equations");
        continue;
      }
      const RVector trial = clamp_to(p + step, opt.bounds);
      const RVector r_trial = residuals(trial);
      const double c_trial = r_trial.allFinite() ? r_trial.squaredNorm()
                                                 : std::numeric_limits<double>::infinity();
      if (c_trial < cost) {
        const double rel = (cost - c_trial) / std::max(cost, 1e-300);
        const double step_norm = (trial - p).norm();
        p = trial;
        r = r_trial;
        cost = c_trial;
        lambda = std::max(lambda / 3.0, 1e-15);
        nu = 2.0;
        accepted = true;
        if (rel < opt.cost_rtol) {
          rep.converged = true;
          rep.message = "relative cost change below tolerance";
          stop = true;
        } else if (step_norm < opt.step_rtol * (p.norm() + opt.step_rtol)) {
          rep.converged = true;
          rep.message = "step below tolerance";
          stop = true;
        }
      } else {
        lambda *= nu;
        nu *= 2.0;
        if (lambda > 1e16) {
          // No descent direction left at working precision: treat as a
          // stationary point when the gradient is small relative to the cost.
          rep.converged = grad.norm() <= 1e-6 * std::max(1.0, std::sqrt(cost));
          rep.message = rep.converged ? "no further decrease possible"
                                      : "damping exhausted without decrease";
          stop = true;
          break;
        }
      }
    }
    if (accepted) jac = numerical_jacobian(residuals, p, opt.jacobian_step, opt.bounds);
    if (stop) {
      ++rep.iterations;
      break;
    }
  }
  if (!rep.converged && rep.message.empty()) rep.message = "maximum iterations reached";

  rep.parameters = p;
  rep.residual_norm = std::sqrt(cost);
  const RMatrix jtj = jac.transpose() * jac;
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(jtj);
  RMatrix cov = cod.pseudoInverse();
  if (!opt.absolute_sigma) {
    const double dof = static_cast<double>(m - n);
    cov *= dof > 0 ? cost / dof : 0.0;
  }
  rep.covariance = 0.5 * (cov + cov.transpose());
  rep.errors = rep.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return rep;
}

FitReport curve_fit(const CurveModel& model, const RVector& p0, std::span<const double> xs,
                    std::span<const double> ys, std::span<const double> sigma,
                    LsqOptions opt) {
  if (xs.size() != ys.size()) throw std::invalid_argument("curve_fit: x/y size mismatch");
  if (!sigma.empty() && sigma.size() != xs.size()) {
    throw std::invalid_argument("curve_fit: sigma size mismatch");
  }
  if (!sigma.empty()) opt.absolute_sigma = true;
  auto res = [&](const RVector& p) {
    RVector r(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double w = sigma.empty() ? 1.0 : 1.0 / sigma[i];
      r[static_cast<Eigen::Index>(i)] = w * (model(xs[i], p) - ys[i]);
    }
    return r;
  };
  return least_squares(res, p0, opt);
}

EigenDecomposition hermitian_eig(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("hermitian_eig: matrix not square");
  const double norm = m.norm();
  if ((m - m.adjoint()).norm() > 1e-10 * std::max(norm, 1e-300)) {
    throw NumericalFailure("hermitian_eig: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalFailure("hermitian_eig: no convergence");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

template <class Mat>
Mat expm_impl(const Mat& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("expm: matrix not square");
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat scaled = a / std::ldexp(1.0, squarings);
  Mat result = Mat::Identity(a.rows(), a.cols());
  Mat term = result;
  for (int k = 1; k <= 40; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return result;
}

}  // namespace

CMatrix expm(const CMatrix& a) { return expm_impl(a); }
RMatrix expm(const RMatrix& a) { return expm_impl(a); }

ScalarMin golden_section(const std::function<double(double)>& f, double a, double b,
                         double xtol, int max_iter) {
  constexpr double invphi = 0.6180339887498949;
  if (a > b) std::swap(a, b);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? ScalarMin{c, fc} : ScalarMin{d, fd};
}

ScalarMin scan_then_refine_log(const std::function<double(double)>& f, double a, double b,
                               int n_scan, double xtol_rel) {
  if (!(a > 0.0) || !(b > a) || n_scan < 3) {
    throw std::invalid_argument("scan_then_refine_log: need 0 < a < b and n_scan >= 3");
  }
  std::vector<double> xs(static_cast<std::size_t>(n_scan));
  std::vector<double> fs(xs.size());
  const double la = std::log(a), lb = std::log(b);
  std::size_t best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = std::exp(la + (lb - la) * static_cast<double>(i) / (n_scan - 1));
    fs[i] = f(xs[i]);
    if (fs[i] < fs[best]) best = i;
  }
  const double lo = xs[best == 0 ? 0 : best - 1];
  const double hi = xs[std::min(best + 1, xs.size() - 1)];
  ScalarMin refined = golden_section(f, lo, hi, xtol_rel * xs[best]);
  if (fs[best] < refined.value) return {xs[best], fs[best]};
  return refined;
}

int CubicRoots::real_count_with_multiplicity() const {
  int n = 0;
  for (const auto& r : real) n += r.multiplicity;
  return n;
}

namespace {

double horner(double c3, double c2, double c1, double c0, double x) {
  return ((c3 * x + c2) * x + c1) * x + c0;
}

double polish(double c3, double c2, double c1, double c0, double x) {
  for (int it = 0; it < 8; ++it) {
    const double fx = horner(c3, c2, c1, c0, x);
    const double dfx = (3.0 * c3 * x + 2.0 * c2) * x + c1;
    if (dfx == 0.0) break;
    const double nx = x - fx / dfx;
    if (!std::isfinite(nx)) break;
    // Accept only steps that do not increase the residual.
    if (std::abs(horner(c3, c2, c1, c0, nx)) > std::abs(fx)) break;
    if (std::abs(nx - x) <= 1e-15 * std::max(std::abs(x), 1e-300)) {
      x = nx;
      break;
    }
    x = nx;
  }
  return x;
}

std::vector<RealRoot> merge_real(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<RealRoot> out;
  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::abs(x));
  const double tol = 1e-6 * std::max(scale, 1e-300);
  for (double x : xs) {
    if (!out.empty() && std::abs(x - out.back().value) <= tol) {
      auto& r = out.back();
      r.value = (r.value * r.multiplicity + x) / (r.multiplicity + 1);
      ++r.multiplicity;
    } else {
      out.push_back({x, 1});
    }
  }
  return out;
}

}  // namespace

CubicRoots cubic_roots(double c3, double c2, double c1, double c0, double imag_tol) {
  CubicRoots out;
  const double cmax = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  if (cmax == 0.0) return out;

  if (std::abs(c3) <= 1e-300) {
    if (std::abs(c2) <= 1e-300) {
      if (std::abs(c1) > 1e-300) out.real.push_back({-c0 / c1, 1});
      return out;
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0.0) {
      const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
      std::vector<double> xs;
      if (q != 0.0) {
        xs.push_back(q / c2);
        xs.push_back(c0 / q);
      } else {
        xs = {0.0, 0.0};
      }
      out.real = merge_real(xs);
    } else {
      out.complex_pairs.push_back(cplx(-c1 / (2.0 * c2), std::sqrt(-disc) / (2.0 * std::abs(c2))));
    }
    return out;
  }

  // Depressed cubic t^3 + p t + q with x = t - b/3.
  const double b = c2 / c3, c = c1 / c3, d = c0 / c3;
  const double shift = b / 3.0;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double half_q = q / 2.0;
  const double third_p = p / 3.0;
  const double disc = half_q * half_q + third_p * third_p * third_p;  // < 0: three real

  std::array<cplx, 3> roots;
  if (p == 0.0 && q == 0.0) {
    roots = {cplx(-shift), cplx(-shift), cplx(-shift)};
  } else if (disc < 0.0) {
    const double r = std::sqrt(-third_p);
    const double arg = std::clamp(-half_q / (r * r * r), -1.0, 1.0);
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k) {
      roots[static_cast<std::size_t>(k)] =
          cplx(2.0 * r * std::cos((phi + kTwoPi * k) / 3.0) - shift, 0.0);
    }
  } else {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-half_q + s);
    const double v = std::cbrt(-half_q - s);
    const double re = -(u + v) / 2.0 - shift;
    const double im = std::sqrt(3.0) / 2.0 * (u - v);
    roots = {cplx(u + v - shift, 0.0), cplx(re, im), cplx(re, -im)};
  }

  std::vector<double> reals;
  for (const auto& z : roots) {
    if (std::abs(z.imag()) <= imag_tol * std::max(std::abs(z), 1e-300)) {
      reals.push_back(polish(c3, c2, c1, c0, z.real()));
    } else if (z.imag() > 0.0) {
      out.complex_pairs.push_back(z);
    }
  }
  out.real = merge_real(reals);
  return out;
}

}  // namespace sklab::numerics
