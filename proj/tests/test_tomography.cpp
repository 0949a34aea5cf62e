#include "sklab/tomography.hpp"

#include <doctest.h>

#include <cmath>

using namespace sklab;
using namespace sklab::tomography;

namespace {

WignerMap map_of(const fock::DensityMatrix& rho, double extent, int n) {
  const auto g = linspace(-extent, extent, n);
  return wigner(rho, g, g);
}

}  // namespace

TEST_CASE("Wigner normalization and Fock-state negativity") {
  const int dim = 20;
  const auto vac = map_of(fock::vacuum(dim), 5.0, 81);
  CHECK(vac.values(40, 40) == doctest::Approx(1.0 / kPi).epsilon(1e-10));
  CHECK(vac.integral() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(vac.negative_volume() < 1e-10);

  const auto one = map_of(fock::fock_state(dim, 1), 5.0, 161);
  CHECK(one.values(80, 80) == doctest::Approx(-1.0 / kPi).epsilon(1e-10));
  CHECK(one.min() == doctest::Approx(-1.0 / kPi).epsilon(1e-10));
  CHECK(one.negative_volume() == doctest::Approx(2.0 * std::exp(-0.5) - 1.0).epsilon(2e-3));
}

TEST_CASE("Wigner of a coherent state is a displaced vacuum") {
  const cplx alpha(0.8, -0.3);
  const auto map = map_of(fock::coherent_state(25, alpha), 4.0, 33);
  for (int i = 0; i < 33; i += 4) {
    for (int j = 0; j < 33; j += 4) {
      const double dx = map.xs[i] - std::sqrt(2.0) * alpha.real();
      const double dp = map.ps[j] - std::sqrt(2.0) * alpha.imag();
      CHECK(map.values(i, j) == doctest::Approx(std::exp(-dx * dx - dp * dp) / kPi).epsilon(1e-8));
    }
  }
}

TEST_CASE("serial and parallel Wigner maps agree") {
  const auto rho = fock::squeezed_thermal_state(15, 0.4, 0.7, 0.2);
  const auto g = linspace(-3.0, 3.0, 17);
  const auto a = wigner(rho, g, g, kernels::Exec::serial);
  const auto b = wigner(rho, g, g, kernels::Exec::parallel);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Gaussian fit recovers the covariance of a squeezed state") {
  const double r = 0.5;
  const auto fit = gaussian_fit(map_of(fock::squeezed_vacuum(30, r), 4.0, 41));
  CHECK(fit.stats.v_min == doctest::Approx(0.5 * std::exp(-2 * r)).epsilon(1e-3));
  CHECK(fit.stats.v_max == doctest::Approx(0.5 * std::exp(2 * r)).epsilon(1e-3));
  CHECK(std::abs(fit.mean[0]) < 1e-6);
  const auto st = covariance_from_rho(fock::squeezed_vacuum(30, r));
  CHECK(st.v_min == doctest::Approx(0.5 * std::exp(-2 * r)).epsilon(1e-8));
}

TEST_CASE("maximum-likelihood reconstruction") {
  const int dim = 12;
  const auto truth = fock::squeezed_vacuum(dim, 0.3);
  const auto map = map_of(truth, 3.0, 21);
  const auto meas = measurements_from_wigner(map);
  const auto rec = mle_reconstruct(meas, dim);
  CHECK(rec.rho.satisfies());
  CHECK(rec.rho.fidelity_with_pure(fock::squeezed_vacuum_vector(dim, 0.3)) > 0.99);
  CHECK(covariance_from_rho(rec.rho).v_min == doctest::Approx(0.5 * std::exp(-0.6)).epsilon(0.02));
  CHECK(rec.log_likelihood >= log_likelihood(meas, fock::vacuum(dim).matrix()));

  const auto sens = truncation_sensitivity(meas, rec, 2);
  CHECK(sens.truncations.size() == 3);
  CHECK(sens.v_min_spread < 0.01);
}

TEST_CASE("over-relaxed MLE steps") {
  const int dim = 12;
  const auto truth = fock::squeezed_vacuum(dim, 0.3);
  std::vector<cplx> alphas;
  for (const auto& m : measurements_from_wigner(map_of(truth, 3.0, 15))) alphas.push_back(m.alpha);
  const auto noisy = simulate_parity_measurements(truth, alphas, 0.05, 3);

  MleOptions plain;
  plain.max_over_relaxation = 1.0;
  const auto a = mle_reconstruct(noisy, dim, plain);
  const auto b = mle_reconstruct(noisy, dim);
  CHECK(b.rho.satisfies());
  CHECK(b.log_likelihood >= a.log_likelihood - 1e-9 * std::abs(a.log_likelihood));
  CHECK(b.iterations <= a.iterations);

  // Noiseless data: plain iteration stalls under the likelihood tolerance well before V_min settles.
  const double r = 0.5 * std::log(2.0);
  const auto sq = fock::squeezed_vacuum(40, r);
  const auto meas = measurements_from_wigner(map_of(sq, 3.0, 21));
  CHECK(covariance_from_rho(mle_reconstruct(meas, 15).rho).v_min == doctest::Approx(0.25).epsilon(0.004));
  CHECK(covariance_from_rho(mle_reconstruct(meas, 15, plain).rho).v_min > 0.255);
}

TEST_CASE("noisy parity records are seeded and bounded") {
  const auto rho = fock::vacuum(8);
  std::vector<cplx> alphas{0.0, {0.5, 0.1}, {-0.3, 0.4}};
  const auto a = simulate_parity_measurements(rho, alphas, 0.5, 11);
  const auto b = simulate_parity_measurements(rho, alphas, 0.5, 11);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].parity == b[k].parity);
    CHECK(std::abs(a[k].parity) <= 1.0);
  }
  const auto exact = simulate_parity_measurements(rho, alphas);
  CHECK(exact[0].parity == doctest::Approx(1.0));
}

TEST_CASE("quantum Fisher information") {
  const int dim = 30;
  CHECK(qfi(fock::vacuum(dim), 0.3) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(qfi(fock::fock_state(dim, 1), 1.1) == doctest::Approx(6.0).epsilon(1e-8));
  const double r = 0.6;
  const auto best = qfi_max(fock::squeezed_vacuum(dim, r));
  CHECK(best.f_max == doctest::Approx(2.0 * std::exp(2 * r)).epsilon(1e-4));

  // Convexity in the state.
  const auto s1 = fock::squeezed_vacuum(dim, 0.5);
  const auto s2 = fock::coherent_state(dim, {0.5, 0.2});
  const double p = 0.35;
  const auto mix = fock::DensityMatrix::from_matrix(p * s1.matrix() + (1 - p) * s2.matrix(), {dim});
  for (double th : {0.0, 0.7, 2.0}) {
    CHECK(qfi(mix, th) <= p * qfi(s1, th) + (1 - p) * qfi(s2, th) + 1e-9);
  }
}
