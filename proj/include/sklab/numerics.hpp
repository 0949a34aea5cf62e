#pragma once

// Shared numerical kernels: adaptive Runge-Kutta, Levenberg-Marquardt,
// Hermitian eigendecomposition, matrix exponential, scalar minimization and
// cubic roots. Everything here is deterministic and free of global state.

#include "sklab/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sklab::numerics {

// ---------------------------------------------------------------------------
// ODE integration (Dormand-Prince 5(4), PI step control)

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 0.0;  // 0: pick from the initial derivative
  double h_max = std::numeric_limits<double>::infinity();
  double h_min = 1e-14;
  // When > 0, take fixed steps of this size and skip error control.
  double fixed_step = 0.0;
  std::size_t max_steps = 200'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

namespace detail {

template <class State>
double scaled_rms_error(const State& err, const State& y0, const State& y1, double atol,
                        double rtol) {
  const auto scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  const double sum = (err.cwiseAbs().array() / scale).square().sum();
  return std::sqrt(sum / static_cast<double>(err.size()));
}

template <class State>
bool all_finite(const State& y) {
  return y.allFinite();
}

}  // namespace detail

// Integrates dy/dt = f(t, y) from t_grid.front() and returns the state at every
// grid point (the first entry is y0). State is any Eigen dense type, real or
// complex. Steps are clipped to land exactly on grid points.
template <class State, class Rhs>
std::vector<State> ode_solve(Rhs&& f, const State& y0, std::span<const double> t_grid,
                             const OdeOptions& opt = {}, OdeStats* stats = nullptr) {
  if (t_grid.empty()) return {};
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("ode_solve: time grid must be strictly increasing");
    }
  }

  // Dormand-Prince tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeStats local;
  OdeStats& st = stats ? *stats : local;

  std::vector<State> out;
  out.reserve(t_grid.size());
  out.push_back(y0);

  State y = y0;
  double t = t_grid.front();
  State k1 = f(t, y);
  ++st.rhs_evals;

  const bool fixed = opt.fixed_step > 0.0;
  double h = fixed ? opt.fixed_step : opt.h_init;
  if (h <= 0.0) {
    const double d0 = y.norm() / std::sqrt(static_cast<double>(y.size()));
    const double d1 = k1.norm() / std::sqrt(static_cast<double>(y.size()));
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, t_grid.back() - t);
  }
  h = std::min(h, opt.h_max);
  double err_prev = 1e-4;
  constexpr double beta = 0.04;
  constexpr double alpha = 0.2 - 0.75 * beta;

  State k2, k3, k4, k5, k6, k7, ynew, tmp;
  for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
    const double t_target = t_grid[gi];
    while (t < t_target) {
      if (st.accepted + st.rejected >= opt.max_steps) {
        throw IntegrationFailure("ode_solve: maximum number of steps exceeded");
      }
      double h_try = std::min(h, opt.h_max);
      bool clipped = false;
      if (t + h_try >= t_target || t_target - (t + h_try) < 1e-12 * std::abs(t_target)) {
        h_try = t_target - t;
        clipped = true;
      }
      tmp = y + h_try * a21 * k1;
      k2 = f(t + c2 * h_try, tmp);
      tmp = y + h_try * (a31 * k1 + a32 * k2);
      k3 = f(t + c3 * h_try, tmp);
      tmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
      k4 = f(t + c4 * h_try, tmp);
      tmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      k5 = f(t + c5 * h_try, tmp);
      tmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      k6 = f(t + h_try, tmp);
      ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = f(t + h_try, ynew);
      st.rhs_evals += 6;

      if (fixed) {
        t += h_try;
        y = ynew;
        k1 = k7;
        ++st.accepted;
        continue;
      }

      tmp = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double err = detail::scaled_rms_error(tmp, y, ynew, opt.atol, opt.rtol);
      if (!std::isfinite(err) || !detail::all_finite(ynew)) err = 1e10;

      if (err <= 1.0) {
        t = clipped ? t_target : t + h_try;
        y = ynew;
        k1 = k7;
        ++st.accepted;
        const double e = std::max(err, 1e-10);
        double fac = 0.9 * std::pow(e, -alpha) * std::pow(err_prev, beta);
        fac = std::clamp(fac, 0.2, 10.0);
        // A clipped step says nothing about the natural step size.
        if (!clipped) h = h_try * fac;
        err_prev = std::max(err, 1e-4);
      } else {
        ++st.rejected;
        const double fac = std::max(0.2, 0.9 * std::pow(err, -alpha));
        h = h_try * fac;
      }
      if (h < opt.h_min) {
        throw IntegrationFailure("ode_solve: step size underflow at t = " + std::to_string(t));
      }
    }
    out.push_back(y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear least squares

struct FitReport {
  RVector parameters;
  RVector errors;  // sqrt(diag(covariance))
  RMatrix covariance;
  double residual_norm = 0.0;  // ||r|| of the weighted residual vector
  int iterations = 0;
  bool converged = false;
  std::string message;
};

struct Bounds {
  RVector lower;
  RVector upper;
};

struct LsqOptions {
  int max_iterations = 500;
  double cost_rtol = 1e-12;
  double gradient_tol = 1e-10;
  double step_rtol = 1e-14;
  double jacobian_step = 1e-6;
  // When true the covariance is (J^T J)^-1 as is (residuals already divided
  // by absolute 1-sigma errors). Otherwise it is scaled by the reduced
  // chi-square.
  bool absolute_sigma = false;
  std::optional<Bounds> bounds;
};

// Residual-vector model r(p); the fit minimizes ||r||^2.
using ResidualFn = std::function<RVector(const RVector&)>;

// Central-difference Jacobian with step jacobian_step * max(|p_j|, 1), falling
// back to one-sided differences at active bounds.
RMatrix numerical_jacobian(const ResidualFn& r, const RVector& p, double rel_step,
                           const std::optional<Bounds>& bounds = std::nullopt);

FitReport least_squares(const ResidualFn& residuals, const RVector& p0,
                        const LsqOptions& opt = {});

// Curve fit: minimizes sum_i w_i (model(x_i, p) - y_i)^2. With sigma given the
// weights are 1/sigma^2 and absolute_sigma is implied.
using CurveModel = std::function<double(double, const RVector&)>;
FitReport curve_fit(const CurveModel& model, const RVector& p0, std::span<const double> xs,
                    std::span<const double> ys, std::span<const double> sigma = {},
                    LsqOptions opt = {});

// ---------------------------------------------------------------------------
// Dense linear algebra

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // columns, orthonormal
};

// Throws NumericalFailure when ||M - M^dag|| > 1e-10 ||M||.
EigenDecomposition hermitian_eig(const CMatrix& m);

// Scaling and squaring with a truncated Taylor series, ~1e-14 relative.
CMatrix expm(const CMatrix& a);
RMatrix expm(const RMatrix& a);

// ---------------------------------------------------------------------------
// Scalar minimization

struct ScalarMin {
  double x = 0.0;
  double value = 0.0;
};

ScalarMin golden_section(const std::function<double(double)>& f, double a, double b,
                         double xtol = 1e-10, int max_iter = 500);

// Scan n points log-uniformly in [a, b] (a > 0), then golden-section refine
// around the best sample.
ScalarMin scan_then_refine_log(const std::function<double(double)>& f, double a, double b,
                               int n_scan, double xtol_rel = 1e-8);

// ---------------------------------------------------------------------------
// Cubic roots

struct RealRoot {
  double value = 0.0;
  int multiplicity = 1;
};

struct CubicRoots {
  std::vector<RealRoot> real;      // ascending
  std::vector<cplx> complex_pairs; // one representative (Im > 0) per pair
  int real_count_with_multiplicity() const;
};

// Roots of c3 x^3 + c2 x^2 + c1 x + c0. Degrades to quadratic / linear when
// leading coefficients vanish. Complex roots with |Im| < imag_tol * |root| are
// classified as real.
CubicRoots cubic_roots(double c3, double c2, double c1, double c0, double imag_tol = 1e-9);

}  // namespace sklab::numerics
