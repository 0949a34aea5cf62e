#pragma once

// Phase-space tomography of the phonon mode: displaced-parity Wigner maps,
// 2D-Gaussian variance extraction, maximum-likelihood reconstruction and the
// quantum Fisher information.
//
// Conventions: X = (a + a^dag)/sqrt(2), P = (a - a^dag)/(i sqrt(2)), vacuum
// variance 1/2, and W normalized to unit integral (vacuum peak 1/pi).

#include "sklab/dynamics.hpp"
#include "sklab/fock.hpp"
#include "sklab/kernels.hpp"
#include "sklab/numerics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sklab::tomography {

std::vector<double> linspace(double a, double b, int n);

struct WignerMap {
  std::vector<double> xs;
  std::vector<double> ps;
  RMatrix values;  // values(i, j) = W(xs[i], ps[j])

  double min() const { return values.minCoeff(); }
  double integral() const;         // rectangle rule on the grid
  double negative_volume() const;  // integral of |W| over W < 0
};

// W(x, p) = Tr[rho D(alpha) P D(alpha)^dag]/pi, alpha = (x + i p)/sqrt(2).
// Grid points with |alpha|^2 > dim/4 add a message to `warnings`.
WignerMap wigner(const fock::DensityMatrix& rho, std::span<const double> xs,
                 std::span<const double> ps, kernels::Exec exec = kernels::Exec::parallel,
                 std::vector<std::string>* warnings = nullptr);

struct GaussianFit {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity() * 0.5;
  double amplitude = 0.0;
  dynamics::QuadratureStats stats;
  numerics::FitReport report;
};

// Fits A exp(-(z - mu)^T Gamma^{-1} (z - mu)/2) with (A, mu, Gamma) free.
GaussianFit gaussian_fit(const WignerMap& map);

struct ParityMeasurement {
  cplx alpha = 0.0;
  double parity = 0.0;  // <D(alpha) P D(alpha)^dag> in [-1, 1]
};

// Exact displaced-parity record of `rho` at each alpha, with optional
// additive Gaussian noise (clipped to [-1, 1]).
std::vector<ParityMeasurement> simulate_parity_measurements(const fock::DensityMatrix& rho,
                                                            std::span<const cplx> alphas,
                                                            double noise_sigma = 0.0,
                                                            std::uint64_t seed = 0);

// Measurements on the (x, p) grid of a Wigner map: parity = pi W.
std::vector<ParityMeasurement> measurements_from_wigner(const WignerMap& map);

struct MleOptions {
  int max_iterations = 5000;
  double ll_rtol = 1e-10;
  // Largest exponent beta tried in the R^beta rho R^beta step; 1 gives plain R rho R.
  double max_over_relaxation = 1024.0;
  kernels::Exec exec = kernels::Exec::parallel;
};

struct TruncationSensitivity {
  std::vector<int> truncations;
  std::vector<double> v_min;
  double v_min_spread = 0.0;  // (max - min)/2 over the truncations
};

struct ReconstructionResult {
  fock::DensityMatrix rho;
  int truncation = 0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::optional<TruncationSensitivity> truncation_sensitivity;
};

// R rho R iteration for the POVM pairs E+-(alpha) = (I +- D P D^dag)/2 with
// frequencies (1 +- parity)/2. Each step tries R^beta rho R^beta for
// beta = 2, 4, ... up to max_over_relaxation and keeps the best likelihood.
// A step that lowers the likelihood is replaced by the diluted map
// (I + e R) rho (I + e R).
ReconstructionResult mle_reconstruct(std::span<const ParityMeasurement> measurements,
                                     int truncation, const MleOptions& opt = {});

// Reruns the reconstruction at truncation +- delta and records V_min spread.
TruncationSensitivity truncation_sensitivity(std::span<const ParityMeasurement> measurements,
                                             const ReconstructionResult& central, int delta = 2,
                                             const MleOptions& opt = {});

double log_likelihood(std::span<const ParityMeasurement> measurements, const CMatrix& rho);

dynamics::QuadratureStats covariance_from_rho(const fock::DensityMatrix& rho);

// A(theta) = X sin(theta) + P cos(theta).
fock::Operator qfi_generator(int dim, double theta);

// F_Q = 2 sum_{k,l: lk + ll > cutoff} (lk - ll)^2/(lk + ll) |<k|A|l>|^2.
double qfi(const fock::DensityMatrix& rho, double theta, double cutoff = 1e-10);

struct QfiMax {
  double f_max = 0.0;
  double theta = 0.0;
};

// 1 degree scan over [0, pi) then golden-section refinement to 1e-4 rad.
QfiMax qfi_max(const fock::DensityMatrix& rho);

}  // namespace sklab::tomography
