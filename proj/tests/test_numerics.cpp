#include "sklab/numerics.hpp"

#include <doctest.h>

#include <cmath>

using namespace sklab;
using namespace sklab::numerics;

TEST_CASE("ode_solve on exponential decay and rotation") {
  const double grid[] = {0.0, 0.5, 1.0, 2.0};
  auto f = [](double, const RVector& y) { return RVector(-0.7 * y); };
  const auto ys = ode_solve(f, RVector(RVector::Constant(1, 2.0)), std::span<const double>(grid));
  for (std::size_t i = 0; i < 4; ++i) CHECK(ys[i][0] == doctest::Approx(2.0 * std::exp(-0.7 * grid[i])).epsilon(1e-8));

  auto g = [](double, const CVector& y) { return CVector(cplx(0.0, -3.0) * y); };
  const double tg[] = {0.0, 10.0};
  const auto zs = ode_solve(g, CVector(CVector::Constant(1, 1.0)), std::span<const double>(tg));
  CHECK(std::abs(zs[1][0] - std::exp(cplx(0.0, -30.0))) < 1e-6);
}

TEST_CASE("ode_solve honours h_max and grid validation") {
  OdeOptions opt;
  opt.h_max = 0.01;
  OdeStats st;
  const double grid[] = {0.0, 1.0};
  auto f = [](double, const RVector& y) { return RVector(0.0 * y); };
  ode_solve(f, RVector(RVector::Ones(1)), std::span<const double>(grid), opt, &st);
  CHECK(st.accepted >= 100);
  const double bad[] = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS(ode_solve(f, RVector(RVector::Ones(1)), std::span<const double>(bad)), std::invalid_argument);
}

TEST_CASE("least_squares recovers an exponential") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 30; ++i) {
    xs.push_back(0.1 * i);
    ys.push_back(1.7 * std::exp(-2.3 * xs.back()) + 0.2);
  }
  auto model = [](double x, const RVector& p) { return p[0] * std::exp(-p[1] * x) + p[2]; };
  const auto r = curve_fit(model, (RVector(3) << 1.0, 1.0, 0.0).finished(), xs, ys);
  REQUIRE(r.converged);
  CHECK(r.parameters[0] == doctest::Approx(1.7).epsilon(1e-7));
  CHECK(r.parameters[1] == doctest::Approx(2.3).epsilon(1e-7));
  CHECK(r.parameters[2] == doctest::Approx(0.2).epsilon(1e-7));
}

TEST_CASE("least_squares respects bounds") {
  LsqOptions opt;
  opt.bounds = Bounds{RVector::Constant(1, 1.0), RVector::Constant(1, 5.0)};
  auto r = least_squares([](const RVector& p) { return RVector::Constant(1, p[0] + 2.0); },
                         RVector::Constant(1, 3.0), opt);
  CHECK(r.parameters[0] == doctest::Approx(1.0));
}

TEST_CASE("curve_fit with sigma gives absolute errors") {
  std::vector<double> xs = {0, 1, 2, 3, 4, 5};
  std::vector<double> ys, sig(6, 0.1);
  for (double x : xs) ys.push_back(2.0 * x + 1.0);
  ys[2] += 0.05;
  auto model = [](double x, const RVector& p) { return p[0] * x + p[1]; };
  const auto r = curve_fit(model, (RVector(2) << 1.0, 0.0).finished(), xs, ys, sig);
  // Linear model: the covariance is sigma^2 (X^T X)^-1 independent of residuals.
  const double sxx = 55.0, sx = 15.0, n = 6.0;
  const double det = n * sxx - sx * sx;
  CHECK(r.errors[0] == doctest::Approx(0.1 * std::sqrt(n / det)).epsilon(1e-6));
}

TEST_CASE("expm and hermitian_eig") {
  CMatrix h(2, 2);
  h << 1.0, cplx(0.0, 0.5), cplx(0.0, -0.5), -0.3;
  const auto eig = hermitian_eig(h);
  CHECK(eig.values[0] <= eig.values[1]);
  CMatrix u = expm(CMatrix(cplx(0.0, -1.0) * h));
  CMatrix ref = eig.vectors * (cplx(0.0, -1.0) * eig.values.cast<cplx>()).array().exp().matrix().asDiagonal() *
                eig.vectors.adjoint();
  CHECK((u - ref).norm() < 1e-12);
  RMatrix nil(2, 2);
  nil << 0.0, 3.0, 0.0, 0.0;
  CHECK((expm(nil) - (RMatrix(2, 2) << 1.0, 3.0, 0.0, 1.0).finished()).norm() < 1e-14);
  CMatrix nonh = h;
  nonh(0, 1) = 2.0;
  CHECK_THROWS_AS(hermitian_eig(nonh), NumericalFailure);
}

TEST_CASE("scalar minimizers") {
  const auto g = golden_section([](double x) { return (x - 1.3) * (x - 1.3); }, 0.0, 4.0, 1e-10);
  CHECK(g.x == doctest::Approx(1.3).epsilon(1e-8));
  // Two local minima; the scan picks the deeper one at x = 30.
  auto f = [](double x) { return -std::exp(-std::pow(std::log(x / 0.02), 2)) - 2.0 * std::exp(-std::pow(std::log(x / 30.0), 2)); };
  const auto s = scan_then_refine_log(f, 1e-3, 1e3, 60);
  CHECK(s.x == doctest::Approx(30.0).epsilon(1e-3));
}

TEST_CASE("cubic_roots") {
  auto r = cubic_roots(1.0, -6.0, 11.0, -6.0);
  REQUIRE(r.real.size() == 3);
  CHECK(r.real[0].value == doctest::Approx(1.0));
  CHECK(r.real[1].value == doctest::Approx(2.0));
  CHECK(r.real[2].value == doctest::Approx(3.0));

  r = cubic_roots(1.0, -4.0, 5.0, -2.0);  // (x-1)^2 (x-2)
  REQUIRE(r.real.size() == 2);
  CHECK(r.real[0].multiplicity == 2);
  CHECK(r.real_count_with_multiplicity() == 3);

  r = cubic_roots(1.0, 0.0, 1.0, 0.0);  // x (x^2 + 1)
  REQUIRE(r.real.size() == 1);
  REQUIRE(r.complex_pairs.size() == 1);
  CHECK(std::abs(r.complex_pairs[0] - cplx(0.0, 1.0)) < 1e-12);

  r = cubic_roots(0.0, 1.0, -3.0, 2.0);  // quadratic
  REQUIRE(r.real.size() == 2);
  CHECK(r.real[1].value == doctest::Approx(2.0));
}
