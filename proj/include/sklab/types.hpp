#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace sklab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

// Vacuum quadrature variance with X = (a + a^dag)/sqrt(2).
inline constexpr double kVacuumVariance = 0.5;

// Internal units: angular frequency in rad/us, time in us.
inline constexpr double mhz_to_rad_per_us(double mhz) { return kTwoPi * mhz; }
inline constexpr double khz_to_rad_per_us(double khz) { return kTwoPi * khz * 1e-3; }
inline constexpr double rad_per_us_to_mhz(double w) { return w / kTwoPi; }
inline constexpr double rad_per_us_to_khz(double w) { return w / kTwoPi * 1e3; }

// Error hierarchy. Numerical failures map to CLI exit code 3, config
// failures to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularParameter : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class FitFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class DegeneracyError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class SaturationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sklab
