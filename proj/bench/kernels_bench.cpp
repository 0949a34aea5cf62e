// Serial reference vs OpenMP kernels on problem sizes used by the tools.

#include "sklab/fock.hpp"
#include "sklab/kernels.hpp"
#include "sklab/tomography.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace sklab;

CMatrix squeezed_rho(int dim) { return fock::squeezed_vacuum(dim, 0.5).matrix(); }

kernels::LindbladTerms lindblad_terms(int dim) {
  const auto a = fock::annihilation(dim).matrix();
  const CMatrix ad = a.adjoint();
  kernels::LindbladTerms t;
  const CMatrix h0 = -0.5 * (ad * ad * a * a) - cplx(0.0, 0.05) * (ad * a);
  t.h_terms = {h0.sparseView(), CMatrix(ad * ad).sparseView(), CMatrix(a * a).sparseView()};
  t.jumps = {CMatrix(std::sqrt(0.1) * a).sparseView()};
  t.jumps_adj = {CMatrix(std::sqrt(0.1) * ad).sparseView()};
  t.finalize();
  return t;
}

template <bool Parallel>
void BM_Wigner(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto rho = squeezed_rho(dim);
  const auto xs = tomography::linspace(-3.0, 3.0, 41);
  for (auto _ : state) {
    auto w = Parallel ? kernels::wigner_grid_parallel(rho, xs, xs) : kernels::wigner_grid_serial(rho, xs, xs);
    benchmark::DoNotOptimize(w.data());
  }
}

template <bool Parallel>
void BM_LindbladRhs(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto terms = lindblad_terms(dim);
  const std::vector<cplx> coeffs = {1.0, 0.1, 0.1};
  const auto rho = squeezed_rho(dim);
  CMatrix out(dim, dim);
  for (auto _ : state) {
    if (Parallel) {
      kernels::lindblad_rhs_parallel(terms, coeffs, rho, out);
    } else {
      kernels::lindblad_rhs_serial(terms, coeffs, rho, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Expectations(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto rho = squeezed_rho(dim);
  std::vector<CMatrix> ops;
  for (int k = 0; k < 32; ++k) ops.push_back(kernels::displaced_parity(cplx(0.05 * k, -0.03 * k), dim));
  for (auto _ : state) {
    auto v = Parallel ? kernels::expectations_parallel(rho, ops) : kernels::expectations_serial(rho, ops);
    benchmark::DoNotOptimize(v.data());
  }
}

}  // namespace

BENCHMARK(BM_Wigner<false>)->Arg(15)->Arg(40);
BENCHMARK(BM_Wigner<true>)->Arg(15)->Arg(40);
BENCHMARK(BM_LindbladRhs<false>)->Arg(40)->Arg(100);
BENCHMARK(BM_LindbladRhs<true>)->Arg(40)->Arg(100);
BENCHMARK(BM_Expectations<false>)->Arg(15)->Arg(40);
BENCHMARK(BM_Expectations<true>)->Arg(15)->Arg(40);

BENCHMARK_MAIN();
