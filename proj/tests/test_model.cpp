#include "sklab/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace sklab;
using namespace sklab::model;

namespace {

DriveParams reference_drives(double xi1, double xi2) {
  const auto dev = DeviceParams::reference();
  const double da = mhz_to_rad_per_us(1.5);
  return DriveParams::symmetric(xi1, xi2, da, 2.0 * dev.g * dev.g / da);
}

}  // namespace

TEST_CASE("reference device lifetimes") {
  const auto d = DeviceParams::reference();
  CHECK_NOTHROW(d.validate());
  CHECK(d.t1_qubit == doctest::Approx(16.93).epsilon(1e-3));
  CHECK(d.t1_phonon == doctest::Approx(132.6).epsilon(1e-3));
  CHECK(d.gamma_phi_qubit() > 0.0);
  auto bad = d;
  bad.t2_qubit = 3.0 * bad.t1_qubit;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("drive parameter validation") {
  CHECK_THROWS_AS(DriveParams::symmetric(1.0, 0.1, 1.0, 0.0).validate(), std::invalid_argument);
  const auto d = DriveParams::symmetric(0.1, 0.2, 10.0, 0.5, 60.0);
  CHECK(d.delta1 == doctest::Approx(-20.0));
  CHECK(d.delta2 == doctest::Approx(40.5));
  CHECK(d.sigma21() == doctest::Approx(20.5));
}

TEST_CASE("squeezing rate at the quoted drive points") {
  const auto dev = DeviceParams::reference();
  // xi1 = 0.28, xi2 = 0.26 at Delta_a = 2pi 1.5 MHz: 2pi 8.1 kHz.
  CHECK(rad_per_us_to_khz(std::abs(squeezing_rate(dev, reference_drives(0.28, 0.26)))) ==
        doctest::Approx(8.14).epsilon(2e-3));
  // xi1 xi2 = 0.02.
  const double xi = std::sqrt(0.02);
  CHECK(rad_per_us_to_khz(std::abs(squeezing_rate(dev, reference_drives(xi, xi)))) ==
        doctest::Approx(2.236).epsilon(2e-3));
  // Phase of the second drive is inherited with a minus sign.
  auto d = reference_drives(0.2, 0.2);
  d.phi = 0.7;
  CHECK(std::arg(squeezing_rate(dev, d)) == doctest::Approx(-0.7));
  // Bilinear in the amplitudes.
  const cplx e1 = squeezing_rate(dev, reference_drives(0.1, 0.2));
  const cplx e2 = squeezing_rate(dev, reference_drives(0.2, 0.2));
  CHECK(std::abs(e2 / e1) == doctest::Approx(2.0));
}

TEST_CASE("effective detuning vanishes at delta = 2 g^2 / Delta_a") {
  const auto dev = DeviceParams::reference();
  const auto eff = effective_params(dev, reference_drives(0.1, 0.1), KerrMethod::perturbative);
  CHECK(std::abs(eff.detuning) < 1e-12);
  auto off = reference_drives(0.1, 0.1);
  off.delta2 += 0.01;
  CHECK(effective_params(dev, off, KerrMethod::perturbative).detuning == doctest::Approx(0.005));
}

TEST_CASE("Kerr from exact diagonalization") {
  auto dev = DeviceParams::reference();
  const double da = mhz_to_rad_per_us(1.5);
  dev.g = 0.0;
  CHECK(kerr_exact(dev, da, {4, 10}) == 0.0);

  // Weak coupling: the exact value approaches the fourth-order series.
  dev.g = da / 50.0;
  const double ratio = kerr_exact(dev, da, {4, 10}) / kerr_fourth_order(dev.g, da, dev.alpha);
  CHECK(ratio == doctest::Approx(1.0).epsilon(2e-3));

  // For Delta_a << alpha all three expressions coincide.
  auto small_alpha_ratio = kerr_fourth_order(1.0, 20.0, 1e5) / kerr_perturbative(1.0, 20.0, 1e5);
  CHECK(small_alpha_ratio == doctest::Approx(1.0).epsilon(1e-3));

  // Convergence in the qubit truncation.
  dev = DeviceParams::reference();
  const double k4 = kerr_exact(dev, mhz_to_rad_per_us(0.53), {4, 10});
  const double k6 = kerr_exact(dev, mhz_to_rad_per_us(0.53), {6, 12});
  CHECK(k4 == doctest::Approx(k6).epsilon(1e-6));
}

TEST_CASE("Kerr at the reference detuning (frozen)") {
  const auto dev = DeviceParams::reference();
  const double da = mhz_to_rad_per_us(0.53);
  CHECK(rad_per_us_to_khz(kerr_perturbative(dev.g, da, dev.alpha)) == doctest::Approx(48.83).epsilon(1e-3));
  CHECK(rad_per_us_to_khz(kerr_exact(dev, da, {4, 10})) == doctest::Approx(16.38).epsilon(1e-3));
}

TEST_CASE("inherited dephasing") {
  const auto dev = DeviceParams::reference();
  const double da = mhz_to_rad_per_us(1.5);
  CHECK(inherited_dephasing(0.0, dev, da) == doctest::Approx(0.0));
  // Linear response: 4 gamma chi^2 p / (gamma^2 + 4 chi^2).
  const double gamma = dev.gamma_qubit();
  const double chi = 2.0 * dev.g * dev.g / da;
  const double p = 1e-6;
  CHECK(inherited_dephasing(p, dev, da) ==
        doctest::Approx(4.0 * gamma * chi * chi * p / (gamma * gamma + 4.0 * chi * chi)).epsilon(1e-4));
  CHECK(inherited_dephasing(0.1, dev, da) > inherited_dephasing(0.05, dev, da));
  CHECK_THROWS_AS(inherited_dephasing(-0.1, dev, da), std::invalid_argument);
}

TEST_CASE("Stark shift is a fixed point and has the expected sign") {
  const auto dev = DeviceParams::reference();
  const auto d = reference_drives(0.28, 0.26);
  const double s = stark_shift(dev, d);
  const double a = dev.alpha;
  auto term = [&](double xi, double delta) {
    const double om = xi * std::abs(delta);
    const double db = delta + s;
    return -2.0 * om * om * a / (db * (db + a));
  };
  CHECK(s == doctest::Approx(term(0.28, d.delta1) + term(0.26, d.delta2)).epsilon(1e-12));
  CHECK(rad_per_us_to_mhz(s) == doctest::Approx(0.23).epsilon(0.1));
  CHECK(stark_shift(dev, reference_drives(0.0, 0.0)) == 0.0);
}

TEST_CASE("driven Hamiltonian") {
  const auto dev = DeviceParams::reference();
  const auto d = reference_drives(0.2, 0.2);
  const fock::HilbertDims dims{3, 5};
  const auto h = full_hamiltonian(dev, d, dims);
  for (double t : {0.0, 0.013, 1.7}) CHECK(h.at(t).is_hermitian(1e-12));
  CHECK((h.at(0.4).matrix() - build_full_hamiltonian(dev, d, dims, 0.4).matrix()).norm() < 1e-12);
  const auto f = bare_frame(dev, d);
  CHECK(h.max_frequency() == doctest::Approx(std::abs(f.delta2)));
  CHECK_THROWS_AS(full_hamiltonian(dev, d, {2, 5}), InvalidDimension);
}

TEST_CASE("squeezed Kerr Hamiltonian") {
  EffectiveParams eff;
  eff.detuning = 0.3;
  eff.epsilon = cplx(0.1, 0.05);
  eff.kerr = 0.02;
  const auto h = build_squeezed_kerr_hamiltonian(eff, 8);
  CHECK(h.is_hermitian());
  CHECK(h(2, 2).real() == doctest::Approx(-0.3 * 2 - 0.02 * 2));
  CHECK(std::abs(h(2, 0) + eff.epsilon * std::sqrt(2.0)) < 1e-14);
  CHECK_THROWS_AS(build_squeezed_kerr_hamiltonian(eff, 3), InvalidDimension);
}
