#include "sklab/full_model.hpp"

#include <doctest.h>

#include <cmath>

using namespace sklab;
using namespace sklab::full_model;

namespace {

model::DriveParams drives(double xi1, double xi2) {
  const auto dev = model::DeviceParams::reference();
  const double da = mhz_to_rad_per_us(1.5);
  return model::DriveParams::symmetric(xi1, xi2, da, 2.0 * dev.g * dev.g / da);
}

}  // namespace

TEST_CASE("jump operators and rates") {
  const auto dev = model::DeviceParams::reference();
  const fock::HilbertDims dims{3, 5};
  const auto j = jumps(dev, dims);
  REQUIRE(j.size() == 4);
  CHECK(j[0].rate == doctest::Approx(1.0 / dev.t1_qubit));
  CHECK(j[1].rate == doctest::Approx(2.0 * dev.gamma_phi_qubit()));
  CHECK(j[2].rate == doctest::Approx(1.0 / dev.t1_phonon));
  CHECK(j[3].rate == doctest::Approx(2.0 * dev.gamma_phi_phonon()));
  for (const auto& x : j) CHECK(x.op.dim() == dims.total());
  Options opt;
  opt.dims = dims;
  opt.decoherence = false;
  CHECK(lindblad_spec(dev, drives(0.28, 0.26), opt).jumps.empty());
}

TEST_CASE("two-level qubit is rejected") {
  Options opt;
  opt.dims = {2, 6};
  CHECK_THROWS_AS(simulate(model::DeviceParams::reference(), drives(0.2, 0.2), {0.0, 1.0}, opt),
                  InvalidDimension);
}

TEST_CASE("Hamiltonian stays Hermitian along the drive period") {
  Options opt;
  opt.dims = {3, 4};
  const auto spec = lindblad_spec(model::DeviceParams::reference(), drives(0.28, 0.26), opt);
  for (double t : {0.0, 0.013, 0.5, 3.7}) {
    const CMatrix h = spec.hamiltonian.at(t).matrix();
    CHECK((h - h.adjoint()).norm() < 1e-9 * (1.0 + h.norm()));
  }
}

TEST_CASE("undriven system stays in the ground state") {
  Options opt;
  opt.dims = {3, 6};
  const auto run = simulate(model::DeviceParams::reference(), drives(0.0, 0.0), {0.0, 1.0, 2.0}, opt);
  for (const auto& st : run.stats) CHECK(st.v_min == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(run.qubit_excited_max < 1e-9);
}

TEST_CASE("short driven run keeps a valid phonon state") {
  Options opt;
  opt.dims = {3, 8};
  const auto run = simulate(model::DeviceParams::reference(), drives(0.28, 0.26), {0.0, 0.5, 1.0}, opt);
  for (const auto& rho : run.phonon_states) {
    CHECK(std::abs(rho.trace_real() - 1.0) < 1e-6);
    CHECK(rho.satisfies());
  }
  CHECK(run.stats.back().v_min <= 0.5 + 1e-9);
  CHECK(run.qubit_excited_max < 0.5);
}

TEST_CASE("two-phonon resonance calibration") {
  const auto dev = model::DeviceParams::reference();
  Options opt;
  opt.dims = {4, 5};
  const auto cal = calibrate_delta_correction(dev, drives(0.28, 0.26), opt);
  CHECK(std::abs(cal.residual_detuning) < 1e-5);
  CHECK(cal.iterations <= 5);
  // Frozen from the probe: well below the dispersive estimate 2 g^2/Delta_a.
  CHECK(cal.delta_correction / kTwoPi * 1e3 == doctest::Approx(79.6).epsilon(0.02));
  CHECK(cal.delta_correction < 2.0 * dev.g * dev.g / mhz_to_rad_per_us(1.5));
}
