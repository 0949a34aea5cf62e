#include "sklab/model.hpp"

#include "sklab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sklab::model {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

void DeviceParams::validate() const {
  require_positive(omega_q, "omega_q");
  require_positive(omega_a, "omega_a");
  require_positive(alpha, "alpha");
  require_positive(g, "g");
  require_positive(t1_qubit, "t1_qubit");
  require_positive(t2_qubit, "t2_qubit");
  require_positive(t1_phonon, "t1_phonon");
  require_positive(t2_phonon, "t2_phonon");
  if (t2_qubit > 2.0 * t1_qubit) throw std::invalid_argument("t2_qubit must not exceed 2 t1_qubit");
  if (t2_phonon > 2.0 * t1_phonon) {
    throw std::invalid_argument("t2_phonon must not exceed 2 t1_phonon");
  }
}

DeviceParams DeviceParams::reference() {
  DeviceParams d;
  d.omega_q = mhz_to_rad_per_us(5042.0);
  d.omega_a = mhz_to_rad_per_us(5023.0);
  d.alpha = mhz_to_rad_per_us(185.0);
  d.g = mhz_to_rad_per_us(0.292);
  // Lifetimes from the quoted rates gamma/2pi: 9.4, 6.6, 1.2, 0.76 kHz.
  d.t1_qubit = 1.0 / khz_to_rad_per_us(9.4);
  d.t2_qubit = 1.0 / khz_to_rad_per_us(6.6);
  d.t1_phonon = 1.0 / khz_to_rad_per_us(1.2);
  d.t2_phonon = 1.0 / khz_to_rad_per_us(0.76);
  return d;
}

void DriveParams::validate() const {
  require_finite(xi1, "xi1");
  require_finite(xi2, "xi2");
  require_finite(delta1, "delta1");
  require_finite(delta2, "delta2");
  require_finite(phi, "phi");
  require_finite(delta_correction, "delta_correction");
  require_finite(delta_a, "delta_a");
  if (std::abs(xi1) >= 1.0 || std::abs(xi2) >= 1.0) {
    throw std::invalid_argument("drive strengths xi1, xi2 must satisfy |xi| < 1");
  }
}

DriveParams DriveParams::symmetric(double xi1, double xi2, double delta_a,
                                   double delta_correction, double spacing, double phi) {
  DriveParams d;
  d.xi1 = xi1;
  d.xi2 = xi2;
  d.delta_a = delta_a;
  d.delta_correction = delta_correction;
  d.delta1 = delta_a - 0.5 * spacing;
  d.delta2 = delta_a + 0.5 * spacing + delta_correction;
  d.phi = phi;
  return d;
}

cplx squeezing_rate(const DeviceParams& device, const DriveParams& drives) {
  const double sigma = drives.sigma21();
  if (drives.delta_a == 0.0) throw SingularParameter("squeezing_rate: delta_a = 0");
  if (sigma + device.alpha == 0.0) throw SingularParameter("squeezing_rate: Sigma21 + alpha = 0");
  const double mag = 2.0 * (device.g * device.g / drives.delta_a) * drives.xi1 * drives.xi2 *
                     device.alpha / (sigma + device.alpha);
  return mag * std::exp(cplx(0.0, -drives.phi));
}

double kerr_perturbative(double g, double delta_a, double alpha) {
  if (delta_a == 0.0) throw SingularParameter("kerr_perturbative: delta_a = 0");
  if (alpha + delta_a == 0.0) throw SingularParameter("kerr_perturbative: alpha + delta_a = 0");
  const double r = delta_a / (alpha + delta_a);
  return std::pow(g, 4) / std::pow(delta_a, 3) * (1.0 + r * r);
}

double kerr_fourth_order(double g, double delta_a, double alpha) {
  if (delta_a == 0.0) throw SingularParameter("kerr_fourth_order: delta_a = 0");
  if (2.0 * delta_a + alpha == 0.0) throw SingularParameter("kerr_fourth_order: 2 delta_a + alpha = 0");
  return std::pow(g, 4) / std::pow(delta_a, 3) * alpha / (2.0 * delta_a + alpha);
}

double kerr_exact(const DeviceParams& device, double delta_a, const fock::HilbertDims& dims) {
  if (dims.qubit_levels < 3) throw InvalidDimension("kerr_exact: qubit_levels must be >= 3");
  if (dims.phonon_levels < 6) throw InvalidDimension("kerr_exact: phonon_levels must be >= 6");
  // The coupling conserves q^dag q + a^dag a; |0, l> lives in the manifold of
  // l excitations spanned by |m, l - m>.
  double e[3];
  for (int l = 0; l < 3; ++l) {
    const int size = std::min(l, dims.qubit_levels - 1) + 1;
    RMatrix block = RMatrix::Zero(size, size);
    for (int m = 0; m < size; ++m) {
      block(m, m) = delta_a * (l - m) - 0.5 * device.alpha * m * (m - 1);
      if (m + 1 < size) {
        const double c = device.g * std::sqrt((m + 1.0) * (l - m));
        block(m, m + 1) = c;
        block(m + 1, m) = c;
      }
    }
    if (device.g == 0.0) {
      e[l] = block(0, 0);
      continue;
    }
    const Eigen::SelfAdjointEigenSolver<RMatrix> es(block);
    if (es.info() != Eigen::Success) throw NumericalFailure("kerr_exact: eigensolver failed");
    const RVector overlap = es.eigenvectors().row(0).cwiseAbs2().transpose();
    Eigen::Index best = 0;
    overlap.maxCoeff(&best);
    double second = 0.0;
    for (Eigen::Index k = 0; k < overlap.size(); ++k) {
      if (k != best) second = std::max(second, overlap[k]);
    }
    if (size > 1 && overlap[best] - second < 1e-6) {
      std::ostringstream os;
      os << "kerr_exact: ambiguous eigenstate assignment for |0," << l << ">";
      throw DegeneracyError(os.str());
    }
    e[l] = es.eigenvalues()[best];
  }
  return ((e[1] - e[0]) - (e[2] - e[1])) / 2.0;
}

EffectiveParams effective_params(const DeviceParams& device, const DriveParams& drives,
                                 KerrMethod kerr, const fock::HilbertDims& kerr_dims) {
  if (drives.delta_a == 0.0) throw SingularParameter("effective_params: delta_a = 0");
  EffectiveParams eff;
  const double shift = device.g * device.g / drives.delta_a;
  eff.omega_a_shifted = device.omega_a + shift;
  // In the shifted-qubit frame omega_j = omega_q + delta_j and omega_a = omega_q + delta_a.
  eff.detuning = 0.5 * (drives.delta1 + drives.delta2 - 2.0 * (drives.delta_a + shift));
  eff.epsilon = squeezing_rate(device, drives);
  eff.kerr = (kerr == KerrMethod::exact)
                 ? kerr_exact(device, drives.delta_a, kerr_dims)
                 : kerr_perturbative(device.g, drives.delta_a, device.alpha);
  return eff;
}

double inherited_dephasing(double p_e, const DeviceParams& device, double delta_a) {
  if (p_e < 0.0 || p_e > 1.0) throw std::invalid_argument("inherited_dephasing: p_e outside [0, 1]");
  if (delta_a == 0.0) throw SingularParameter("inherited_dephasing: delta_a = 0");
  const double gamma = device.gamma_qubit();
  const double chi = 2.0 * device.g * device.g / delta_a;
  const cplx u = 1.0 + cplx(0.0, 2.0 * chi / gamma);
  const cplx root = std::sqrt(u * u + cplx(0.0, 8.0 * chi * p_e / gamma));
  return 0.5 * gamma * (root - 1.0).real();
}

double stark_shift(const DeviceParams& device, const DriveParams& drives) {
  const double om1 = drives.xi1 * std::abs(drives.delta1);
  const double om2 = drives.xi2 * std::abs(drives.delta2);
  const double a = device.alpha;
  auto term = [a](double om, double d) {
    if (om == 0.0) return 0.0;
    if (d == 0.0 || d + a == 0.0) throw SingularParameter("stark_shift: drive resonant with a qubit transition");
    return -2.0 * om * om * a / (d * (d + a));
  };
  double s = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double next = term(om1, drives.delta1 + s) + term(om2, drives.delta2 + s);
    if (std::abs(next - s) <= 1e-13 * std::max(1.0, std::abs(next))) return next;
    s = next;
  }
  throw NumericalFailure("stark_shift: fixed-point iteration did not converge");
}

BareFrame bare_frame(const DeviceParams& device, const DriveParams& drives,
                     bool include_stark_shift) {
  BareFrame f;
  f.stark_shift = include_stark_shift ? stark_shift(device, drives) : 0.0;
  f.delta_a = drives.delta_a + f.stark_shift;
  f.delta1 = drives.delta1 + f.stark_shift;
  f.delta2 = drives.delta2 + f.stark_shift;
  f.omega1 = drives.xi1 * std::abs(drives.delta1);
  f.omega2 = drives.xi2 * std::abs(drives.delta2);
  return f;
}

fock::Operator DrivenHamiltonian::at(double t) const {
  fock::Operator h = constant;
  for (const auto& tone : tones) {
    h.matrix() += (tone.amplitude * std::exp(cplx(0.0, -tone.frequency * t))) * tone.op.matrix();
  }
  return h;
}

double DrivenHamiltonian::max_frequency() const {
  double m = 0.0;
  for (const auto& tone : tones) m = std::max(m, std::abs(tone.frequency));
  return m;
}

DrivenHamiltonian full_hamiltonian(const DeviceParams& device, const DriveParams& drives,
                                   const fock::HilbertDims& dims, bool include_stark_shift) {
  dims.validate(true);
  const BareFrame f = bare_frame(device, drives, include_stark_shift);
  const auto q = fock::on_qubit(fock::annihilation(dims.qubit_levels), dims);
  const auto a = fock::on_phonon(fock::annihilation(dims.phonon_levels), dims);
  const auto qd = q.adjoint();
  const auto ad = a.adjoint();

  DrivenHamiltonian h;
  h.constant = -(0.5 * device.alpha) * (qd * qd * q * q);
  // g a^dag q e^{i Delta_a t} + h.c.
  h.tones.push_back({ad * q, device.g, -f.delta_a});
  h.tones.push_back({qd * a, device.g, f.delta_a});
  const cplx ph = std::exp(cplx(0.0, -drives.phi));
  if (f.omega1 != 0.0) {
    h.tones.push_back({qd, f.omega1, f.delta1});
    h.tones.push_back({q, f.omega1, -f.delta1});
  }
  if (f.omega2 != 0.0) {
    h.tones.push_back({qd, f.omega2 * ph, f.delta2});
    h.tones.push_back({q, f.omega2 * std::conj(ph), -f.delta2});
  }
  return h;
}

fock::Operator build_full_hamiltonian(const DeviceParams& device, const DriveParams& drives,
                                      const fock::HilbertDims& dims, double t) {
  return full_hamiltonian(device, drives, dims).at(t);
}

fock::Operator build_squeezed_kerr_hamiltonian(const EffectiveParams& eff, int dim) {
  if (dim < 4) throw InvalidDimension("build_squeezed_kerr_hamiltonian: dim must be >= 4");
  const auto a = fock::annihilation(dim);
  const auto ad = a.adjoint();
  fock::Operator h = (-eff.detuning) * (ad * a);
  h -= eff.epsilon * (ad * ad);
  h -= std::conj(eff.epsilon) * (a * a);
  h -= eff.kerr * (ad * ad * a * a);
  return h;
}

}  // namespace sklab::model
