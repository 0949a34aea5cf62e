#include "sklab/full_model.hpp"

#include "sklab/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace sklab::full_model {

std::vector<dynamics::Jump> jumps(const model::DeviceParams& device, const fock::HilbertDims& dims) {
  const auto q = fock::on_qubit(fock::annihilation(dims.qubit_levels), dims);
  const auto a = fock::on_phonon(fock::annihilation(dims.phonon_levels), dims);
  std::vector<dynamics::Jump> out;
  out.push_back({q, device.gamma_qubit()});
  out.push_back({q.adjoint() * q, 2.0 * device.gamma_phi_qubit()});
  out.push_back({a, device.gamma_phonon()});
  out.push_back({a.adjoint() * a, 2.0 * device.gamma_phi_phonon()});
  return out;
}

dynamics::LindbladSpec lindblad_spec(const model::DeviceParams& device,
                                     const model::DriveParams& drives, const Options& opt) {
  dynamics::LindbladSpec spec;
  spec.hamiltonian = model::full_hamiltonian(device, drives, opt.dims, opt.stark_shift);
  if (opt.decoherence) spec.jumps = jumps(device, opt.dims);
  return spec;
}

namespace {

dynamics::EvolveOptions evolve_options(const Options& opt) {
  dynamics::EvolveOptions eo;
  eo.ode.rtol = opt.rtol;
  eo.ode.atol = opt.atol;
  eo.exec = opt.exec;
  return eo;
}

double qubit_excited(const fock::DensityMatrix& rho, const fock::HilbertDims& dims) {
  double ground = 0.0;
  for (int n = 0; n < dims.phonon_levels; ++n) ground += rho.matrix()(n, n).real();
  return 1.0 - ground;
}

void set_delta_correction(model::DriveParams& d, double delta) {
  d.delta2 += delta - d.delta_correction;
  d.delta_correction = delta;
}

}  // namespace

Run simulate(const model::DeviceParams& device, const model::DriveParams& drives,
             const std::vector<double>& t_grid, const Options& opt) {
  device.validate();
  drives.validate();
  const auto spec = lindblad_spec(device, drives, opt);
  const int n = opt.dims.total();
  const auto rho0 = fock::DensityMatrix::pure(fock::fock_vector(n, 0), opt.dims.modes());
  const auto states = dynamics::evolve_lindblad(rho0, spec, t_grid, evolve_options(opt));

  Run run;
  run.times = t_grid;
  run.phonon_states.reserve(states.size());
  run.stats.reserve(states.size());
  for (const auto& rho : states) {
    run.qubit_excited_max = std::max(run.qubit_excited_max, qubit_excited(rho, opt.dims));
    run.phonon_states.push_back(rho.phonon_reduced());
    auto st = dynamics::variances_from_moments(dynamics::phonon_moments(rho));
    st.purity = run.phonon_states.back().purity();
    run.stats.push_back(st);
  }
  return run;
}

FrequencyProbe probe_phonon_frequency(const model::DeviceParams& device,
                                      const model::DriveParams& drives, const Options& opt,
                                      double duration, int phonon_levels) {
  device.validate();
  drives.validate();
  const fock::HilbertDims dims{opt.dims.qubit_levels, phonon_levels};
  dims.validate(true);
  Options popt = opt;
  popt.dims = dims;
  popt.decoherence = false;
  const auto spec = lindblad_spec(device, drives, popt);
  const auto frame = model::bare_frame(device, drives, opt.stark_shift);

  // Phonon-like eigenvector of the single-excitation block {|e,0>, |g,1>}
  // at the dressed qubit-phonon detuning.
  const double da = drives.delta_a;
  const double theta = 0.5 * std::atan2(2.0 * device.g, da);
  const double v_e = -std::sin(theta);
  const double v_1 = std::cos(theta);

  const int np = dims.phonon_levels;
  const double beta = 0.1;
  const int n_samples = 200;
  std::vector<double> grid(n_samples + 1);
  for (int k = 0; k <= n_samples; ++k) grid[k] = duration * k / n_samples;

  const auto a_op = fock::on_phonon(fock::annihilation(np), dims);
  std::vector<std::vector<cplx>> traces;
  const cplx starts[2] = {cplx(beta, 0.0), cplx(0.0, beta)};
  for (const cplx b0 : starts) {
    CVector psi = CVector::Zero(dims.total());
    psi[0] = 1.0;
    psi[1 * np + 0] += b0 * v_e;
    psi[0 * np + 1] += b0 * v_1;
    psi.normalize();
    const auto states = dynamics::evolve_lindblad(fock::DensityMatrix::pure(psi, dims.modes()), spec,
                                                  grid, evolve_options(popt));
    std::vector<cplx> tr;
    tr.reserve(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
      tr.push_back(fock::expectation(states[k], a_op));
    }
    traces.push_back(std::move(tr));
  }

  FrequencyProbe out;
  out.frame_rate = 0.5 * (frame.delta1 + frame.delta2) - frame.delta_a;
  for (auto& tr : traces) {
    for (std::size_t k = 0; k < tr.size(); ++k) tr[k] *= std::exp(cplx(0.0, out.frame_rate * grid[k]));
  }

  auto residuals = [&](const RVector& p) {
    const double delta = p[0];
    const cplx eps(p[1], p[2]);
    CMatrix g(2, 2);
    g << cplx(0.0, delta), 2.0 * kI * eps, -2.0 * kI * std::conj(eps), cplx(0.0, -delta);
    RVector r(static_cast<Eigen::Index>(4 * traces.size() * grid.size()));
    Eigen::Index i = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const CMatrix u = numerics::expm(CMatrix(g * grid[k]));
      for (const auto& tr : traces) {
        const cplx b0 = tr[0];
        const cplx pred = u(0, 0) * b0 + u(0, 1) * std::conj(b0);
        const cplx diff = (pred - tr[k]) / beta;
        r[i++] = diff.real();
        r[i++] = diff.imag();
      }
    }
    return RVector(r.head(i));
  };
  const cplx eps0 = -model::squeezing_rate(device, drives);
  const RVector p0 = (RVector(3) << 0.0, eps0.real(), eps0.imag()).finished();
  out.report = numerics::least_squares(residuals, p0);
  if (!out.report.converged) throw FitFailure("probe_phonon_frequency: " + out.report.message);
  out.detuning = out.report.parameters[0];
  out.epsilon = cplx(out.report.parameters[1], out.report.parameters[2]);
  return out;
}

Calibration calibrate_delta_correction(const model::DeviceParams& device,
                                       model::DriveParams drives, const Options& opt,
                                       double tolerance) {
  Calibration cal;
  set_delta_correction(drives, 2.0 * device.g * device.g / drives.delta_a);
  for (cal.iterations = 1; cal.iterations <= 8; ++cal.iterations) {
    const auto probe = probe_phonon_frequency(device, drives, opt);
    cal.residual_detuning = probe.detuning;
    if (std::abs(probe.detuning) < tolerance) break;
    set_delta_correction(drives, drives.delta_correction - 2.0 * probe.detuning);
  }
  if (cal.iterations > 8) throw NumericalFailure("calibrate_delta_correction: no convergence");
  cal.delta_correction = drives.delta_correction;
  return cal;
}

EpsilonExtraction extract_epsilon(const model::DeviceParams& device, model::DriveParams drives,
                                  const std::vector<double>& t_grid, const Options& opt) {
  EpsilonExtraction out;
  out.calibration = calibrate_delta_correction(device, drives, opt);
  set_delta_correction(drives, out.calibration.delta_correction);
  out.epsilon_formula = std::abs(model::squeezing_rate(device, drives));
  out.epsilon_probe = probe_phonon_frequency(device, drives, opt).epsilon;
  out.run = simulate(device, drives, t_grid, opt);

  std::vector<dynamics::VminSample> samples;
  for (std::size_t k = 0; k < t_grid.size(); ++k) samples.push_back({t_grid[k], out.run.stats[k].v_min, 0.0});
  out.fit = dynamics::extract_squeezing_rate(samples);
  out.epsilon_simulated = out.fit.epsilon;
  out.epsilon_error = out.fit.epsilon_error;
  out.gamma_simulated = out.fit.gamma;
  return out;
}

}  // namespace sklab::full_model
