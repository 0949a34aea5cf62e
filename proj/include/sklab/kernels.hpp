#pragma once

// Data-parallel inner loops. Every kernel has a plain serial version and an
// OpenMP version with the same output; the serial one is the test reference.
// Parallel loops partition output entries (never a shared accumulator), so
// results do not depend on the thread count.

#include "sklab/types.hpp"

#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace sklab::kernels {

using SparseC = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

enum class Exec { serial, parallel };

// <m|D(beta)|n> of the untruncated displacement, for m, n < dim, from the
// associated Laguerre closed form.
CMatrix displacement_elements(cplx beta, int dim);

// D(alpha) P D(alpha)^dag = D(2 alpha) P, matrix elements within `dim`.
CMatrix displaced_parity(cplx alpha, int dim);

// Tr[rho D(alpha) P D(alpha)^dag].
double displaced_parity_expectation(const CMatrix& rho, cplx alpha);

// W(x_i, p_j) = Tr[rho Pi(alpha)] / pi with alpha = (x + i p)/sqrt(2).
RMatrix wigner_grid_serial(const CMatrix& rho, std::span<const double> xs,
                           std::span<const double> ps);
RMatrix wigner_grid_parallel(const CMatrix& rho, std::span<const double> xs,
                             std::span<const double> ps);

// Tr[rho O_k] (real part) for a list of Hermitian operators.
RVector expectations_serial(const CMatrix& rho, const std::vector<CMatrix>& ops);
RVector expectations_parallel(const CMatrix& rho, const std::vector<CMatrix>& ops);

// sum_k c_k O_k, summed in index order for every entry.
CMatrix weighted_sum_serial(const std::vector<CMatrix>& ops, const RVector& coeffs);
CMatrix weighted_sum_parallel(const std::vector<CMatrix>& ops, const RVector& coeffs);

// Lindblad right-hand side with H_eff = sum_k c_k H_k already including
// -(i/2) sum L^dag L:
//   out = -i (H_eff rho - (H_eff rho)^dag) + sum_j L_j rho L_j^dag.
// `jumps_adj` holds L_j^dag. The map is applied to the Hermitian part of rho,
// so round-off in the anti-Hermitian part is never amplified.
struct LindbladTerms {
  std::vector<SparseC> h_terms;
  std::vector<SparseC> jumps;
  std::vector<SparseC> jumps_adj;

  // Union sparsity pattern of h_terms and, per term, (position, value) pairs
  // on it. When present the kernels assemble sum_k c_k H_k once per call and
  // do a single product. Call finalize() again after changing h_terms.
  SparseC h_union;
  std::vector<std::vector<std::pair<Eigen::Index, cplx>>> h_scatter;
  void finalize();
};

void lindblad_rhs_serial(const LindbladTerms& terms, std::span<const cplx> h_coeffs,
                         const CMatrix& rho, CMatrix& out);
void lindblad_rhs_parallel(const LindbladTerms& terms, std::span<const cplx> h_coeffs,
                           const CMatrix& rho, CMatrix& out);

inline void lindblad_rhs(Exec e, const LindbladTerms& terms, std::span<const cplx> h_coeffs,
                         const CMatrix& rho, CMatrix& out) {
  if (e == Exec::parallel) {
    lindblad_rhs_parallel(terms, h_coeffs, rho, out);
  } else {
    lindblad_rhs_serial(terms, h_coeffs, rho, out);
  }
}

int max_threads();

}  // namespace sklab::kernels
