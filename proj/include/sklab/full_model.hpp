#pragma once

// Time-domain simulation of the driven qubit-phonon system and extraction of
// the squeezing rate it produces.

#include "sklab/dynamics.hpp"
#include "sklab/model.hpp"

#include <vector>

namespace sklab::full_model {

struct Options {
  fock::HilbertDims dims{4, 25};
  bool stark_shift = true;
  bool decoherence = true;
  double rtol = 1e-8;
  double atol = 1e-10;
  kernels::Exec exec = kernels::Exec::parallel;
};

// sqrt(1/T1) q, sqrt(2 gamma_phi) q^dag q on the qubit and the same pair on
// the phonon.
std::vector<dynamics::Jump> jumps(const model::DeviceParams& device, const fock::HilbertDims& dims);

dynamics::LindbladSpec lindblad_spec(const model::DeviceParams& device,
                                     const model::DriveParams& drives, const Options& opt);

struct Run {
  std::vector<double> times;
  std::vector<fock::DensityMatrix> phonon_states;
  std::vector<dynamics::QuadratureStats> stats;
  double qubit_excited_max = 0.0;
};

// Qubit ground state (x) phonon vacuum, evolved with drives on from t = 0.
Run simulate(const model::DeviceParams& device, const model::DriveParams& drives,
             const std::vector<double>& t_grid, const Options& opt = {});

struct FrequencyProbe {
  double frame_rate = 0.0;  // r: b = <a> e^{i r t} is static, r = drive mean - bare Delta_a
  double detuning = 0.0;    // Delta of d b/dt = i Delta b + 2i eps b*
  cplx epsilon = 0.0;
  numerics::FitReport report;
};

// Effective detuning and squeezing rate seen by a weak coherent excitation of
// the dressed phonon mode under the drives (no decoherence). Two runs with
// orthogonal initial phases are fitted jointly to the linear model above.
FrequencyProbe probe_phonon_frequency(const model::DeviceParams& device,
                                      const model::DriveParams& drives, const Options& opt,
                                      double duration = 4.0, int phonon_levels = 5);

struct Calibration {
  double delta_correction = 0.0;
  double residual_detuning = 0.0;
  int iterations = 0;
};

// Chooses drives.delta_correction so the probed detuning vanishes
// (two-phonon resonance). Starts from 2 g^2/Delta_a.
Calibration calibrate_delta_correction(const model::DeviceParams& device,
                                       model::DriveParams drives, const Options& opt,
                                       double tolerance = 1e-5);

struct EpsilonExtraction {
  double epsilon_formula = 0.0;  // |eps| from the closed form
  double epsilon_simulated = 0.0;
  double epsilon_error = 0.0;
  double gamma_simulated = 0.0;
  cplx epsilon_probe = 0.0;
  dynamics::SqueezingRateFit fit;
  Calibration calibration;
  Run run;
};

// Calibrates delta, simulates, and fits V_min(t) with the decay-squeezing model.
EpsilonExtraction extract_epsilon(const model::DeviceParams& device, model::DriveParams drives,
                                  const std::vector<double>& t_grid, const Options& opt = {});

}  // namespace sklab::full_model
