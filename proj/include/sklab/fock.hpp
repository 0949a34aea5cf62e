#pragma once

// Truncated Fock-space operators and states for a qubit (transmon, treated as
// a bosonic mode) coupled to a phonon mode. Two-mode objects are always
// ordered qubit (x) phonon; the mode list carried by every Operator and
// DensityMatrix records this ordering.

#include "sklab/types.hpp"

#include <string>
#include <vector>

namespace sklab::fock {

using ModeDims = std::vector<int>;

struct HilbertDims {
  int qubit_levels = 4;
  int phonon_levels = 25;

  int total() const { return qubit_levels * phonon_levels; }
  ModeDims modes() const { return {qubit_levels, phonon_levels}; }
  // Throws InvalidDimension. The two-photon qubit pathway needs >= 3 levels.
  void validate(bool two_photon_processes) const;
};

class Operator {
 public:
  Operator() = default;
  explicit Operator(CMatrix m);  // single mode of dimension m.rows()
  Operator(CMatrix m, ModeDims modes);

  static Operator identity(const ModeDims& modes);
  static Operator zero(const ModeDims& modes);

  const CMatrix& matrix() const { return m_; }
  CMatrix& matrix() { return m_; }
  const ModeDims& modes() const { return modes_; }
  Eigen::Index dim() const { return m_.rows(); }

  Operator adjoint() const { return Operator(m_.adjoint(), modes_); }
  bool is_hermitian(double tol = 1e-12) const;
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(double s, Operator a) { return a *= cplx(s); }

 private:
  CMatrix m_;
  ModeDims modes_;
};

int total_dim(const ModeDims& modes);

Operator annihilation(int dim);
Operator creation(int dim);
Operator number(int dim);
Operator identity(int dim);
Operator parity(int dim);
// X = (a + a^dag)/sqrt(2), P = (a - a^dag)/(i sqrt(2)).
Operator quadrature_x(int dim);
Operator quadrature_p(int dim);

// Kronecker product, first factor is the slow (qubit) index.
Operator tensor(const Operator& a, const Operator& b);

// Lift a single-mode operator into qubit (x) phonon.
Operator on_qubit(const Operator& op, const HilbertDims& dims);
Operator on_phonon(const Operator& op, const HilbertDims& dims);

// |alpha|^2 <= dim/4 keeps the truncated displacement unitary to ~1e-8.
bool displacement_is_safe(cplx alpha, int dim);

// exp(alpha a^dag - alpha* a) on the truncated space. When the truncation
// heuristic fails a message is appended to `warnings` (if given); the
// operator is still returned.
Operator displacement(cplx alpha, int dim, std::vector<std::string>* warnings = nullptr);

// exp((xi* a^2 - xi a^dag^2)/2), xi = r e^{i phi}.
Operator squeeze(cplx xi, int dim);

// Tr(rho op) requires matching dimensions.
class DensityMatrix;
cplx expectation(const DensityMatrix& rho, const Operator& op);

struct DensityDiagnostics {
  double hermiticity_error = 0.0;  // max |rho - rho^dag|
  double trace_error = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;
};

struct DensityTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double min_eigenvalue = -1e-8;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;

  // Validates the physical invariants; throws NumericalFailure with the
  // offending diagnostic otherwise.
  static DensityMatrix from_matrix(CMatrix m, ModeDims modes, const DensityTolerances& tol = {});
  static DensityMatrix unchecked(CMatrix m, ModeDims modes);
  static DensityMatrix pure(const CVector& psi, ModeDims modes);
  static DensityMatrix pure(const CVector& psi);

  const CMatrix& matrix() const { return m_; }
  const ModeDims& modes() const { return modes_; }
  Eigen::Index dim() const { return m_.rows(); }

  DensityDiagnostics diagnostics() const;
  bool satisfies(const DensityTolerances& tol = {}) const;
  double purity() const;
  double trace_real() const { return m_.trace().real(); }

  // Nearest physical state: Hermitian part, negative eigenvalues clipped,
  // trace renormalized.
  DensityMatrix projected() const;

  // Reduced phonon state of a qubit (x) phonon density matrix.
  DensityMatrix phonon_reduced() const;

  // Copy into a single-mode space of `dim` levels (padding with zeros or
  // dropping the tail, then renormalizing).
  DensityMatrix resized(int dim) const;

  double fidelity_with_pure(const CVector& psi) const;
  RVector populations() const;

 private:
  DensityMatrix(CMatrix m, ModeDims modes) : m_(std::move(m)), modes_(std::move(modes)) {}
  CMatrix m_;
  ModeDims modes_;
};

// Single-mode states.
CVector fock_vector(int dim, int n);
CVector coherent_vector(int dim, cplx alpha);
CVector squeezed_vacuum_vector(int dim, double r, double phi = 0.0);
DensityMatrix vacuum(int dim);
DensityMatrix fock_state(int dim, int n);
DensityMatrix coherent_state(int dim, cplx alpha);
DensityMatrix squeezed_vacuum(int dim, double r, double phi = 0.0);
DensityMatrix thermal_state(int dim, double nbar);
// S(xi) rho_th(nbar) S(xi)^dag computed in `dim` levels.
DensityMatrix squeezed_thermal_state(int dim, double r, double phi, double nbar);

}  // namespace sklab::fock
