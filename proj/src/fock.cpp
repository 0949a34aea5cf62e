#include "sklab/fock.hpp"

#include "sklab/numerics.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <sstream>

namespace sklab::fock {

void HilbertDims::validate(bool two_photon_processes) const {
  if (phonon_levels < 2) throw InvalidDimension("phonon_levels must be >= 2");
  if (qubit_levels < 2) throw InvalidDimension("qubit_levels must be >= 2");
  if (two_photon_processes && qubit_levels < 3) {
    throw InvalidDimension("qubit_levels must be >= 3 for two-photon qubit processes");
  }
}

int total_dim(const ModeDims& modes) {
  int d = 1;
  for (int m : modes) d *= m;
  return d;
}

Operator::Operator(CMatrix m) : m_(std::move(m)), modes_{static_cast<int>(m_.rows())} {
  if (m_.rows() != m_.cols()) throw InvalidDimension("operator must be square");
}

Operator::Operator(CMatrix m, ModeDims modes) : m_(std::move(m)), modes_(std::move(modes)) {
  if (m_.rows() != m_.cols()) throw InvalidDimension("operator must be square");
  if (total_dim(modes_) != m_.rows()) {
    throw InvalidDimension("operator size does not match the product of mode dimensions");
  }
}

Operator Operator::identity(const ModeDims& modes) {
  const int d = total_dim(modes);
  return Operator(CMatrix::Identity(d, d), modes);
}

Operator Operator::zero(const ModeDims& modes) {
  const int d = total_dim(modes);
  return Operator(CMatrix::Zero(d, d), modes);
}

bool Operator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& o) {
  if (modes_ != o.modes_) throw DimensionMismatch("operator sum: mode dimensions differ");
  m_ += o.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& o) {
  if (modes_ != o.modes_) throw DimensionMismatch("operator difference: mode dimensions differ");
  m_ -= o.m_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.modes_ != b.modes_) throw DimensionMismatch("operator product: mode dimensions differ");
  return Operator(a.m_ * b.m_, a.modes_);
}

Operator annihilation(int dim) {
  if (dim < 2) throw InvalidDimension("annihilation: dim must be >= 2");
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(std::move(m));
}

Operator creation(int dim) { return annihilation(dim).adjoint(); }

Operator number(int dim) {
  if (dim < 1) throw InvalidDimension("number: dim must be >= 1");
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
  return Operator(std::move(m));
}

Operator identity(int dim) {
  if (dim < 1) throw InvalidDimension("identity: dim must be >= 1");
  return Operator(CMatrix::Identity(dim, dim));
}

Operator parity(int dim) {
  if (dim < 1) throw InvalidDimension("parity: dim must be >= 1");
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return Operator(std::move(m));
}

Operator quadrature_x(int dim) {
  const Operator a = annihilation(dim);
  return (1.0 / std::sqrt(2.0)) * (a + a.adjoint());
}

Operator quadrature_p(int dim) {
  const Operator a = annihilation(dim);
  return cplx(0.0, -1.0 / std::sqrt(2.0)) * (a - a.adjoint());
}

Operator tensor(const Operator& a, const Operator& b) {
  ModeDims modes = a.modes();
  modes.insert(modes.end(), b.modes().begin(), b.modes().end());
  CMatrix k = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return Operator(std::move(k), std::move(modes));
}

Operator on_qubit(const Operator& op, const HilbertDims& dims) {
  if (op.dim() != dims.qubit_levels) throw DimensionMismatch("on_qubit: dimension mismatch");
  return tensor(op, identity(dims.phonon_levels));
}

Operator on_phonon(const Operator& op, const HilbertDims& dims) {
  if (op.dim() != dims.phonon_levels) throw DimensionMismatch("on_phonon: dimension mismatch");
  return tensor(identity(dims.qubit_levels), op);
}

bool displacement_is_safe(cplx alpha, int dim) { return std::norm(alpha) <= dim / 4.0; }

Operator displacement(cplx alpha, int dim, std::vector<std::string>* warnings) {
  if (!displacement_is_safe(alpha, dim) && warnings) {
    std::ostringstream os;
    os << "displacement |alpha|^2 = " << std::norm(alpha) << " exceeds dim/4 = " << dim / 4.0
       << "; truncation errors expected";
    warnings->push_back(os.str());
  }
  const Operator a = annihilation(dim);
  const CMatrix gen = alpha * a.adjoint().matrix() - std::conj(alpha) * a.matrix();
  return Operator(numerics::expm(gen));
}

Operator squeeze(cplx xi, int dim) {
  const CMatrix a = annihilation(dim).matrix();
  const CMatrix ad = a.adjoint();
  const CMatrix gen = 0.5 * (std::conj(xi) * (a * a) - xi * (ad * ad));
  return Operator(numerics::expm(gen));
}

cplx expectation(const DensityMatrix& rho, const Operator& op) {
  if (rho.dim() != op.dim()) throw DimensionMismatch("expectation: dimension mismatch");
  // Tr(rho op) without forming the product.
  return (rho.matrix().transpose().cwiseProduct(op.matrix())).sum();
}

// ---------------------------------------------------------------------------

DensityMatrix DensityMatrix::from_matrix(CMatrix m, ModeDims modes, const DensityTolerances& tol) {
  if (m.rows() != m.cols()) throw InvalidDimension("density matrix must be square");
  if (total_dim(modes) != m.rows()) throw InvalidDimension("density matrix: mode dims mismatch");
  DensityMatrix rho(std::move(m), std::move(modes));
  const auto d = rho.diagnostics();
  if (d.hermiticity_error > tol.hermiticity || d.trace_error > tol.trace ||
      d.min_eigenvalue < tol.min_eigenvalue) {
    std::ostringstream os;
    os << "invalid density matrix: hermiticity error " << d.hermiticity_error << ", trace error "
       << d.trace_error << ", min eigenvalue " << d.min_eigenvalue;
    throw NumericalFailure(os.str());
  }
  return rho;
}

DensityMatrix DensityMatrix::unchecked(CMatrix m, ModeDims modes) {
  if (m.rows() != m.cols()) throw InvalidDimension("density matrix must be square");
  if (total_dim(modes) != m.rows()) throw InvalidDimension("density matrix: mode dims mismatch");
  return DensityMatrix(std::move(m), std::move(modes));
}

DensityMatrix DensityMatrix::pure(const CVector& psi, ModeDims modes) {
  const CVector v = psi / psi.norm();
  return unchecked(v * v.adjoint(), std::move(modes));
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  return pure(psi, ModeDims{static_cast<int>(psi.size())});
}

DensityDiagnostics DensityMatrix::diagnostics() const {
  DensityDiagnostics d;
  d.hermiticity_error = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(m_.trace() - cplx(1.0));
  const CMatrix h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

bool DensityMatrix::satisfies(const DensityTolerances& tol) const {
  const auto d = diagnostics();
  return d.hermiticity_error <= tol.hermiticity && d.trace_error <= tol.trace &&
         d.min_eigenvalue >= tol.min_eigenvalue;
}

double DensityMatrix::purity() const {
  return (m_.transpose().cwiseProduct(m_)).sum().real();
}

DensityMatrix DensityMatrix::projected() const {
  const CMatrix h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  RVector w = es.eigenvalues().cwiseMax(0.0);
  const double s = w.sum();
  if (s <= 0.0) throw NumericalFailure("projected: density matrix has no positive weight");
  w /= s;
  CMatrix p = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  p = 0.5 * (p + p.adjoint()).eval();
  return DensityMatrix(std::move(p), modes_);
}

DensityMatrix DensityMatrix::phonon_reduced() const {
  if (modes_.size() != 2) throw DimensionMismatch("phonon_reduced: expected qubit (x) phonon");
  const int nq = modes_[0];
  const int np = modes_[1];
  CMatrix r = CMatrix::Zero(np, np);
  for (int k = 0; k < nq; ++k) r += m_.block(k * np, k * np, np, np);
  return DensityMatrix(std::move(r), ModeDims{np});
}

DensityMatrix DensityMatrix::resized(int dim) const {
  if (modes_.size() != 1) throw DimensionMismatch("resized: single-mode state expected");
  if (dim < 1) throw InvalidDimension("resized: dim must be >= 1");
  CMatrix r = CMatrix::Zero(dim, dim);
  const Eigen::Index k = std::min<Eigen::Index>(dim, m_.rows());
  r.topLeftCorner(k, k) = m_.topLeftCorner(k, k);
  const cplx tr = r.trace();
  if (std::abs(tr) <= 0.0) throw NumericalFailure("resized: no weight left after truncation");
  r /= tr;
  return DensityMatrix(std::move(r), ModeDims{dim});
}

double DensityMatrix::fidelity_with_pure(const CVector& psi) const {
  if (psi.size() != m_.rows()) throw DimensionMismatch("fidelity: dimension mismatch");
  const CVector v = psi / psi.norm();
  return (v.adjoint() * m_ * v)(0, 0).real();
}

RVector DensityMatrix::populations() const { return m_.diagonal().real(); }

// ---------------------------------------------------------------------------

CVector fock_vector(int dim, int n) {
  if (n < 0 || n >= dim) throw InvalidDimension("fock_vector: level outside truncation");
  CVector v = CVector::Zero(dim);
  v[n] = 1.0;
  return v;
}

CVector coherent_vector(int dim, cplx alpha) {
  if (dim < 1) throw InvalidDimension("coherent_vector: dim must be >= 1");
  CVector v(dim);
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return v / v.norm();
}

CVector squeezed_vacuum_vector(int dim, double r, double phi) {
  if (dim < 1) throw InvalidDimension("squeezed_vacuum_vector: dim must be >= 1");
  CVector v = CVector::Zero(dim);
  const cplx ratio = -std::exp(kI * phi) * std::tanh(r);
  cplx c = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 0; 2 * n < dim; ++n) {
    v[2 * n] = c;
    const double nn = static_cast<double>(n);
    c *= ratio * std::sqrt((2.0 * nn + 1.0) * (2.0 * nn + 2.0)) / (2.0 * (nn + 1.0));
  }
  return v / v.norm();
}

DensityMatrix vacuum(int dim) { return DensityMatrix::pure(fock_vector(dim, 0)); }
DensityMatrix fock_state(int dim, int n) { return DensityMatrix::pure(fock_vector(dim, n)); }
DensityMatrix coherent_state(int dim, cplx alpha) {
  return DensityMatrix::pure(coherent_vector(dim, alpha));
}
DensityMatrix squeezed_vacuum(int dim, double r, double phi) {
  return DensityMatrix::pure(squeezed_vacuum_vector(dim, r, phi));
}

DensityMatrix thermal_state(int dim, double nbar) {
  if (nbar < 0.0) throw std::invalid_argument("thermal_state: nbar must be >= 0");
  CMatrix m = CMatrix::Zero(dim, dim);
  if (nbar == 0.0) {
    m(0, 0) = 1.0;
  } else {
    const double x = nbar / (1.0 + nbar);
    double p = 1.0 / (1.0 + nbar);
    for (int n = 0; n < dim; ++n, p *= x) m(n, n) = p;
    m /= m.trace();
  }
  return DensityMatrix::unchecked(std::move(m), ModeDims{dim});
}

DensityMatrix squeezed_thermal_state(int dim, double r, double phi, double nbar) {
  const int big = 2 * dim + 20;
  const CMatrix s = squeeze(std::polar(r, phi), big).matrix();
  const CMatrix th = thermal_state(big, nbar).matrix();
  CMatrix full = s * th * s.adjoint();
  return DensityMatrix::unchecked(std::move(full), ModeDims{big}).resized(dim);
}

}  // namespace sklab::fock
