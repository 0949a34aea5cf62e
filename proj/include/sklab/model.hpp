#pragma once

// Device/drive parameters, the driven qubit-phonon Hamiltonian and the
// closed-form effective-model constants (squeezing rate, Kerr, dephasing).
// All frequencies are angular, rad/us; times in us.

#include "sklab/fock.hpp"
#include "sklab/types.hpp"

#include <vector>

namespace sklab::model {

struct DeviceParams {
  double omega_q = 0.0;
  double omega_a = 0.0;
  double alpha = 0.0;  // positive; enters as -(alpha/2) q^dag^2 q^2
  double g = 0.0;
  double t1_qubit = 0.0;
  double t2_qubit = 0.0;
  double t1_phonon = 0.0;
  double t2_phonon = 0.0;

  // Throws std::invalid_argument.
  void validate() const;

  double gamma_qubit() const { return 1.0 / t1_qubit; }
  double gamma_phonon() const { return 1.0 / t1_phonon; }
  // Pure dephasing rate gamma_phi with 1/T2 = 1/(2 T1) + gamma_phi.
  double gamma_phi_qubit() const { return 1.0 / t2_qubit - 0.5 / t1_qubit; }
  double gamma_phi_phonon() const { return 1.0 / t2_phonon - 0.5 / t1_phonon; }

  // Device table of the squeezing experiment, with g = 2pi * 292 kHz.
  static DeviceParams reference();
};

struct DriveParams {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double delta1 = 0.0;  // drive 1 minus (Stark-shifted) qubit frequency
  double delta2 = 0.0;
  double phi = 0.0;
  double delta_correction = 0.0;
  double delta_a = 0.0;  // phonon minus (Stark-shifted) qubit frequency

  double sigma21() const { return delta1 + delta2; }
  void validate() const;

  // delta1 = delta_a - spacing/2, delta2 = delta_a + spacing/2 + delta.
  static DriveParams symmetric(double xi1, double xi2, double delta_a, double delta_correction,
                               double spacing = kTwoPi * 30.0, double phi = 0.0);
};

struct EffectiveParams {
  double detuning = 0.0;
  cplx epsilon = 0.0;
  double kerr = 0.0;
  double omega_a_shifted = 0.0;
};

enum class KerrMethod { exact, perturbative };

// 2 (g^2/Delta_a) xi1 xi2 alpha/(Sigma21 + alpha) e^{-i phi}.
cplx squeezing_rate(const DeviceParams& device, const DriveParams& drives);

// (g^4/Delta_a^3)(1 + Delta_a^2/(alpha + Delta_a)^2).
double kerr_perturbative(double g, double delta_a, double alpha);

// Fourth-order Rayleigh-Schroedinger result for the same Hamiltonian,
// (g^4/Delta_a^3) alpha/(2 Delta_a + alpha). Used to analyse kerr_exact.
double kerr_fourth_order(double g, double delta_a, double alpha);

// Exact diagonalization of Delta_a a^dag a - (alpha/2) q^dag^2 q^2 + g(q^dag a + q a^dag),
// K = ((E1 - E0) - (E2 - E1))/2 on the dressed |0, l> states. The coupling
// conserves excitation number, so only the l <= 2 manifolds are diagonalized;
// dims bounds the qubit ladder and is validated.
double kerr_exact(const DeviceParams& device, double delta_a, const fock::HilbertDims& dims);

EffectiveParams effective_params(const DeviceParams& device, const DriveParams& drives,
                                 KerrMethod kerr = KerrMethod::exact,
                                 const fock::HilbertDims& kerr_dims = {4, 10});

// Gamma_phi = (gamma/2) Re[sqrt((1 + 2i chi/gamma)^2 + 8i chi p_e/gamma) - 1],
// chi = 2 g^2/Delta_a, gamma = 1/T1 of the qubit.
double inherited_dephasing(double p_e, const DeviceParams& device, double delta_a);

// Second-order AC Stark shift of the qubit 0-1 transition from the two drives,
// solved self-consistently with the bare detunings Delta_j + shift.
double stark_shift(const DeviceParams& device, const DriveParams& drives);

// Bare (unshifted) detunings entering the rotating-frame Hamiltonian.
struct BareFrame {
  double stark_shift = 0.0;
  double delta_a = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double omega1 = 0.0;  // drive amplitudes xi_j |Delta_j|
  double omega2 = 0.0;
};
BareFrame bare_frame(const DeviceParams& device, const DriveParams& drives,
                     bool include_stark_shift = true);

// H(t) = H0 + sum_k amplitude_k e^{-i frequency_k t} op_k.
struct Tone {
  fock::Operator op;
  cplx amplitude = 0.0;
  double frequency = 0.0;
};

struct DrivenHamiltonian {
  fock::Operator constant;
  std::vector<Tone> tones;

  fock::Operator at(double t) const;
  double max_frequency() const;
};

DrivenHamiltonian full_hamiltonian(const DeviceParams& device, const DriveParams& drives,
                                   const fock::HilbertDims& dims, bool include_stark_shift = true);

// Rotating-frame Hamiltonian of the driven system at time t.
fock::Operator build_full_hamiltonian(const DeviceParams& device, const DriveParams& drives,
                                      const fock::HilbertDims& dims, double t);

// -Delta a^dag a - (eps a^dag^2 + eps* a^2) - K a^dag^2 a^2.
fock::Operator build_squeezed_kerr_hamiltonian(const EffectiveParams& eff, int dim);

}  // namespace sklab::model
