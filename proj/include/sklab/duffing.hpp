#pragma once

// Classical driven Duffing oscillator: steady-state occupations, the
// qubit-population inversion used to read them out, bistability thresholds
// and the two-stage spectroscopy fit.

#include "sklab/numerics.hpp"
#include "sklab/types.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sklab::duffing {

struct DuffingParams {
  double alpha_m = 0.0;      // 2K
  double kappa = 0.0;        // linewidth
  double omega_a = 0.0;      // resonance, in the same frame as the probe grid
  double omega_p_amp = 0.0;  // effective probe amplitude
  void validate() const;
};

// Nonnegative real roots of
//   alpha_m^2 n^3 - 2 Delta_p alpha_m n^2 + (Delta_p^2 + kappa^2/4) n = Omega_p^2,
// ascending, with multiplicities.
std::vector<numerics::RealRoot> steady_state_occupation(const DuffingParams& params,
                                                        double delta_p);

enum class Branch { lowest, highest };

// Occupation on the requested branch at probe frequency omega_p
// (Delta_p = omega_p - omega_a).
double branch_occupation(const DuffingParams& params, double omega_p, Branch branch = Branch::lowest);

// Discriminant of the steady-state cubic; > 0 means three distinct real roots.
double cubic_discriminant(const DuffingParams& params, double delta_p);

// Qubit population for an off-resonant drive g_a sqrt(n), and its inverse.
double qubit_population(double n_bar, double delta_a, double g_a);
double infer_phonon_population(double p_e, double delta_a, double g_a);

// Delta_p^+- = 2 alpha_m n +- sqrt(4 alpha_m^2 n^2 - kappa^2)/2, when 2|alpha_m| n >= kappa.
std::optional<std::pair<double, double>> bifurcation_points(double alpha_m, double kappa,
                                                            double n_bar);

// |kappa/(sqrt(3) alpha_m)|; +infinity for alpha_m = 0.
double critical_occupation(double kappa, double alpha_m);

struct SpectroscopyDataset {
  std::vector<double> detunings;  // probe frequencies, rad/us
  std::vector<double> qubit_populations;
  std::vector<double> inferred_occupations;
  double delta_a = 0.0;
  double g_a = 0.0;

  // Fills inferred_occupations from qubit_populations.
  void infer();
};

struct FitOptions {
  Branch branch = Branch::lowest;
  double weight_width = 5.0;  // in units of the initial kappa
  double weight_floor = 0.2;
};

struct DuffingFit {
  DuffingParams params;
  DuffingParams errors;
  numerics::FitReport stage1;
  numerics::FitReport stage2;
};

// Stage 1 fits (alpha_m, kappa, Omega_p) with omega_a frozen at init.omega_a;
// stage 2 refits all four from the stage-1 optimum. Data points are weighted
// by max(floor, exp(-((x - init.omega_a)/(width kappa))^2/2)).
DuffingFit fit_spectroscopy(const SpectroscopyDataset& data, const DuffingParams& init,
                            const FitOptions& opt = {});

}  // namespace sklab::duffing
