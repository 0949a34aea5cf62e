#pragma once

// Maximum achievable squeezing under decoherence, Kerr nonlinearity and
// finite measurement time, as sweeps over the dynamics module.

#include "sklab/dynamics.hpp"
#include "sklab/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace sklab::limits {

struct SweepGrid {
  std::vector<std::string> axes;
  std::vector<std::vector<double>> values;
  std::string metric = "max_squeezing_dB";

  void validate() const;  // nonempty axes, finite values
  std::size_t size() const;
  // Lexicographic in axis order, last axis fastest.
  std::vector<std::size_t> index(std::size_t flat) const;
  std::vector<double> point(std::size_t flat) const;
};

struct TimeOptimum {
  double t = 0.0;
  double v_min = 0.5;
  double db = 0.0;
  bool at_horizon = false;  // minimum sits on the upper end of the bracket
};

// Minimizes V_min(t) over t in [1e-3, 10] max(1/eps, 1/gamma) with a 60-point
// log scan and golden-section refinement (in log t).
TimeOptimum minimize_over_time(const std::function<double(double)>& v_min, double epsilon,
                               double gamma);

struct DecoherencePoint {
  double delta_a = 0.0;
  double gamma = 0.0;      // 1/T1p + (g/Delta_a)^2 / T1q
  double gamma_phi = 0.0;  // bare phonon dephasing + inherited term
  TimeOptimum optimum;
};

struct DecoherenceOptions {
  bool purcell = true;
  bool inherited_dephasing = true;
};

std::vector<DecoherencePoint> max_squeezing_decoherence(double epsilon,
                                                        const std::vector<double>& delta_a_grid,
                                                        const model::DeviceParams& device,
                                                        double p_e,
                                                        const DecoherenceOptions& opt = {});

struct KerrOptions {
  int dim = 40;
  int coarse_points = 240;
  double tail_tolerance = 1e-6;  // population in the top two levels
  kernels::Exec exec = kernels::Exec::serial;
};

struct KerrPoint {
  double eps_over_k = 0.0;
  double gamma_over_k = 0.0;
  TimeOptimum optimum;  // time in units of 1/K when K > 0
  int dim_used = 0;
  bool truncation_rerun = false;
  double tail_population = 0.0;
};

// Vacuum evolved under eps (a^2 + a^dag^2) - K a^dag^2 a^2 with decay sqrt(gamma) a;
// minimum of V_min over time. Absolute units; kerr may be 0.
KerrPoint kerr_limited_squeezing(double epsilon, double kerr, double gamma,
                                 const KerrOptions& opt = {});

// Surface over (eps/K, gamma/K) with K = 1, row-major in (eps/K, gamma/K).
std::vector<KerrPoint> max_squeezing_kerr(const std::vector<double>& eps_over_k,
                                          const std::vector<double>& gamma_over_k,
                                          const KerrOptions& opt = {});

struct MeasurementLoss {
  double v_initial = 0.5;
  double v_measured = 0.5;
  double db_initial = 0.0;
  double db_measured = 0.0;
};

// Energy relaxation only during a measurement of duration t_meas.
MeasurementLoss measurement_time_loss(double v0, double gamma, double t_meas);

}  // namespace sklab::limits
