#pragma once

// Open-system evolution: direct Lindblad integration on the density matrix,
// the closed moment equations of the quadratic squeezing Hamiltonian, and
// the analytic variance formulas built on them.

#include "sklab/fock.hpp"
#include "sklab/kernels.hpp"
#include "sklab/model.hpp"
#include "sklab/numerics.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sklab::dynamics {

// L = sqrt(rate) * op.
struct Jump {
  fock::Operator op;
  double rate = 0.0;
};

struct LindbladSpec {
  model::DrivenHamiltonian hamiltonian;
  // Overrides `hamiltonian` when set. Slower: rebuilt on every evaluation.
  std::function<fock::Operator(double)> hamiltonian_fn;
  std::vector<Jump> jumps;

  static LindbladSpec constant(fock::Operator h, std::vector<Jump> jumps);
};

struct EvolveOptions {
  numerics::OdeOptions ode;
  // Upper bound on the step is 1/(20 max tone frequency) when tones exist.
  double tone_step_factor = 20.0;
  double trace_tolerance = 1e-7;
  fock::DensityTolerances state_tolerance{1e-8, 1e-7, -1e-8};
  bool check_invariants = true;
  kernels::Exec exec = kernels::Exec::parallel;
};

// Integrates d rho/dt = -i[H(t), rho] + sum_j (L rho L^dag - {L^dag L, rho}/2).
// Returns the state at every grid point, first entry rho0, Hermitian-symmetrized.
std::vector<fock::DensityMatrix> evolve_lindblad(const fock::DensityMatrix& rho0,
                                                 const LindbladSpec& spec,
                                                 std::span<const double> t_grid,
                                                 const EvolveOptions& opt = {},
                                                 numerics::OdeStats* stats = nullptr);

struct Moments {
  cplx mean_a = 0.0;
  double mean_n = 0.0;
  cplx mean_aa = 0.0;
};

struct QuadratureStats {
  double v_min = 0.5;
  double v_max = 0.5;
  double angle = 0.0;  // minor axis of X cos(theta) + P sin(theta), in [0, pi)
  double n_thermal = 0.0;
  double purity = 1.0;
};

struct MomentTrajectory {
  std::vector<double> times;
  std::vector<cplx> mean_a;
  std::vector<double> mean_n;
  std::vector<cplx> mean_aa;

  Moments at(std::size_t i) const { return {mean_a[i], mean_n[i], mean_aa[i]}; }
  std::size_t size() const { return times.size(); }
};

// Phonon moments of a single-mode or qubit (x) phonon state.
Moments phonon_moments(const fock::DensityMatrix& rho);

// Moment equations for H = Delta a^dag a + eps a^dag^2 + eps* a^2 with decay
// sqrt(gamma) a and dephasing sqrt(2 gamma_phi) a^dag a. The effective model
// -Delta a^dag a - (eps a^dag^2 + h.c.) maps to (delta, epsilon) = (-Delta, -eps).
// Solved exactly as an affine linear system.
MomentTrajectory moment_evolution(double delta, cplx epsilon, double gamma, double gamma_phi,
                                  const Moments& init, std::span<const double> t_grid);

// Throws NumericalFailure if v_min v_max < 1/4 - 1e-6.
QuadratureStats variances_from_moments(const Moments& m);

struct VariancePair {
  double v_min = 0.5;
  double v_max = 0.5;
  bool singular_limit = false;  // gamma = 4 eps, v_max taken as its limit
};

// Delta = gamma_phi = 0 from vacuum; epsilon >= 0.
VariancePair closed_form_squeezing(double epsilon, double gamma, double t);

// Free decay of an ideal squeezed state with initial minimum variance v0.
VariancePair free_decay_variances(double v0, double gamma, double gamma_phi, double t);

struct VminSample {
  double t = 0.0;
  double v_min = 0.5;
  double sigma = 0.0;  // 0: unweighted
};

struct SqueezingRateFit {
  double epsilon = 0.0;
  double gamma = 0.0;
  double epsilon_error = 0.0;
  double gamma_error = 0.0;
  RMatrix covariance;
  numerics::FitReport report;
};

// Fits V_min(t) = (gamma + 4 eps e^{-t(gamma + 4 eps)})/(2(gamma + 4 eps)).
SqueezingRateFit extract_squeezing_rate(std::span<const VminSample> samples);

// Fits V_min(t) = (1 + e^{-gamma t}(2 V0 - 1))/2 for (V0, gamma).
struct DecayFit {
  double v0 = 0.5;
  double gamma = 0.0;
  double v0_error = 0.0;
  double gamma_error = 0.0;
  numerics::FitReport report;
};
DecayFit fit_squeezing_decay(std::span<const VminSample> samples);

double to_db(double variance);

}  // namespace sklab::dynamics
