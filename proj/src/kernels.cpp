#include "sklab/kernels.hpp"

#include <algorithm>

#include <omp.h>

#include <cmath>

namespace sklab::kernels {

CMatrix displacement_elements(cplx beta, int dim) {
  if (dim < 1) throw InvalidDimension("displacement_elements: dim must be >= 1");
  CMatrix d = CMatrix::Zero(dim, dim);
  const double x = std::norm(beta);
  if (x == 0.0) return CMatrix::Identity(dim, dim);
  const double log_abs = 0.5 * std::log(x);
  const double phase = std::arg(beta);

  std::vector<double> lag(dim);
  for (int k = 0; k < dim; ++k) {
    // L_j^{(k)}(x) for j = 0 .. dim-1-k.
    const int jmax = dim - 1 - k;
    lag[0] = 1.0;
    if (jmax >= 1) lag[1] = 1.0 + k - x;
    for (int j = 1; j < jmax; ++j) {
      lag[j + 1] = ((2.0 * j + 1.0 + k - x) * lag[j] - (j + k) * lag[j - 1]) / (j + 1.0);
    }
    for (int j = 0; j <= jmax; ++j) {
      // m = j + k >= n = j: sqrt(n!/m!) beta^k e^{-x/2} L_n^{(k)}.
      const double logmag =
          0.5 * (std::lgamma(j + 1.0) - std::lgamma(j + k + 1.0)) + k * log_abs - 0.5 * x;
      const double mag = std::exp(logmag) * lag[j];
      d(j + k, j) = std::polar(mag, k * phase);
      if (k > 0) {
        // m = j < n = j + k: sqrt(m!/n!) (-beta*)^k e^{-x/2} L_m^{(k)}.
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        d(j, j + k) = std::polar(sign * mag, -k * phase);
      }
    }
  }
  return d;
}

CMatrix displaced_parity(cplx alpha, int dim) {
  CMatrix d = displacement_elements(2.0 * alpha, dim);
  for (int n = 1; n < dim; n += 2) d.col(n) *= -1.0;
  return d;
}

double displaced_parity_expectation(const CMatrix& rho, cplx alpha) {
  const CMatrix pi_op = displaced_parity(alpha, static_cast<int>(rho.rows()));
  return (rho.transpose().cwiseProduct(pi_op)).sum().real();
}

namespace {

inline cplx grid_alpha(double x, double p) { return cplx(x, p) / std::sqrt(2.0); }

}  // namespace

RMatrix wigner_grid_serial(const CMatrix& rho, std::span<const double> xs,
                           std::span<const double> ps) {
  RMatrix w(xs.size(), ps.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      w(i, j) = displaced_parity_expectation(rho, grid_alpha(xs[i], ps[j])) / kPi;
    }
  }
  return w;
}

RMatrix wigner_grid_parallel(const CMatrix& rho, std::span<const double> xs,
                             std::span<const double> ps) {
  const long nx = static_cast<long>(xs.size());
  const long np = static_cast<long>(ps.size());
  RMatrix w(nx, np);
#pragma omp parallel for collapse(2) schedule(dynamic, 4)
  for (long i = 0; i < nx; ++i) {
    for (long j = 0; j < np; ++j) {
      w(i, j) = displaced_parity_expectation(rho, grid_alpha(xs[i], ps[j])) / kPi;
    }
  }
  return w;
}

RVector expectations_serial(const CMatrix& rho, const std::vector<CMatrix>& ops) {
  RVector out(static_cast<Eigen::Index>(ops.size()));
  const CMatrix rt = rho.transpose();
  for (std::size_t k = 0; k < ops.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = rt.cwiseProduct(ops[k]).sum().real();
  }
  return out;
}

RVector expectations_parallel(const CMatrix& rho, const std::vector<CMatrix>& ops) {
  const long n = static_cast<long>(ops.size());
  RVector out(n);
  const CMatrix rt = rho.transpose();
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) out[k] = rt.cwiseProduct(ops[k]).sum().real();
  return out;
}

CMatrix weighted_sum_serial(const std::vector<CMatrix>& ops, const RVector& coeffs) {
  if (ops.empty()) throw DimensionMismatch("weighted_sum: empty operator list");
  CMatrix out = CMatrix::Zero(ops[0].rows(), ops[0].cols());
  for (std::size_t k = 0; k < ops.size(); ++k) out += coeffs[static_cast<Eigen::Index>(k)] * ops[k];
  return out;
}

CMatrix weighted_sum_parallel(const std::vector<CMatrix>& ops, const RVector& coeffs) {
  if (ops.empty()) throw DimensionMismatch("weighted_sum: empty operator list");
  const long rows = ops[0].rows();
  const long cols = ops[0].cols();
  const std::size_t n = ops.size();
  CMatrix out(rows, cols);
  // Each entry is reduced in index order, same as the serial loop.
#pragma omp parallel for collapse(2) schedule(static)
  for (long c = 0; c < cols; ++c) {
    for (long r = 0; r < rows; ++r) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += coeffs[static_cast<Eigen::Index>(k)] * ops[k](r, c);
      out(r, c) = s;
    }
  }
  return out;
}

void LindbladTerms::finalize() {
  h_scatter.clear();
  if (h_terms.empty()) {
    h_union = SparseC();
    return;
  }
  const Eigen::Index n = h_terms.front().rows();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (const auto& h : h_terms) {
    for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
      for (SparseC::InnerIterator it(h, c); it; ++it) trip.emplace_back(it.row(), it.col(), 1.0);
    }
  }
  h_union = SparseC(n, n);
  h_union.setFromTriplets(trip.begin(), trip.end());
  h_union.makeCompressed();
  const auto* outer = h_union.outerIndexPtr();
  const auto* inner = h_union.innerIndexPtr();
  for (const auto& h : h_terms) {
    std::vector<std::pair<Eigen::Index, cplx>> sc;
    for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
      for (SparseC::InnerIterator it(h, c); it; ++it) {
        const auto* pos = std::lower_bound(inner + outer[c], inner + outer[c + 1], it.row());
        sc.emplace_back(static_cast<Eigen::Index>(pos - inner), it.value());
      }
    }
    h_scatter.push_back(std::move(sc));
  }
}

namespace {

bool has_union(const LindbladTerms& terms) {
  return !terms.h_terms.empty() && terms.h_scatter.size() == terms.h_terms.size();
}

SparseC assemble(const LindbladTerms& terms, std::span<const cplx> h_coeffs) {
  SparseC h = terms.h_union;
  cplx* v = h.valuePtr();
  std::fill(v, v + h.nonZeros(), cplx(0.0));
  for (std::size_t k = 0; k < terms.h_scatter.size(); ++k) {
    const cplx c = h_coeffs[k];
    for (const auto& [pos, val] : terms.h_scatter[k]) v[pos] += c * val;
  }
  return h;
}

}  // namespace

void lindblad_rhs_serial(const LindbladTerms& terms, std::span<const cplx> h_coeffs,
                         const CMatrix& rho_in, CMatrix& out) {
  const CMatrix rho = 0.5 * (rho_in + rho_in.adjoint());
  CMatrix m;
  if (has_union(terms)) {
    m.noalias() = assemble(terms, h_coeffs) * rho;
  } else {
    m = CMatrix::Zero(rho.rows(), rho.cols());
    for (std::size_t k = 0; k < terms.h_terms.size(); ++k) m.noalias() += h_coeffs[k] * (terms.h_terms[k] * rho);
  }
  out = cplx(0.0, -1.0) * (m - m.adjoint());
  for (std::size_t j = 0; j < terms.jumps.size(); ++j) {
    const CMatrix t = rho * terms.jumps_adj[j];
    out.noalias() += terms.jumps[j] * t;
  }
}

void lindblad_rhs_parallel(const LindbladTerms& terms, std::span<const cplx> h_coeffs,
                           const CMatrix& rho_in, CMatrix& out) {
  const long n = rho_in.rows();
  CMatrix rho(n, n);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n; ++c) rho.col(c) = 0.5 * (rho_in.col(c) + rho_in.row(c).adjoint());
  const std::size_t nh = terms.h_terms.size();
  const std::size_t nj = terms.jumps.size();
  const bool united = has_union(terms);
  const SparseC h = united ? assemble(terms, h_coeffs) : SparseC();
  CMatrix m(n, n);
  CMatrix jump_sum(n, n);
  std::vector<CMatrix> t(nj, CMatrix(n, n));

#pragma omp parallel
  {
    CVector col(n);
#pragma omp for schedule(static)
    for (long c = 0; c < n; ++c) {
      if (united) {
        col.noalias() = h * rho.col(c);
      } else {
        col.setZero();
        for (std::size_t k = 0; k < nh; ++k) col.noalias() += h_coeffs[k] * (terms.h_terms[k] * rho.col(c));
      }
      m.col(c) = col;
      // (rho L^dag)[:, c] = sum over the nonzeros of column c of L^dag.
      for (std::size_t j = 0; j < nj; ++j) {
        col.setZero();
        for (SparseC::InnerIterator it(terms.jumps_adj[j], c); it; ++it) {
          col.noalias() += it.value() * rho.col(it.row());
        }
        t[j].col(c) = col;
      }
    }
#pragma omp for schedule(static)
    for (long c = 0; c < n; ++c) {
      col.setZero();
      for (std::size_t j = 0; j < nj; ++j) col.noalias() += terms.jumps[j] * t[j].col(c);
      jump_sum.col(c) = col;
    }
  }
  out.resize(n, n);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n; ++c) {
    out.col(c) = cplx(0.0, -1.0) * (m.col(c) - m.row(c).adjoint()) + jump_sum.col(c);
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace sklab::kernels
