// Serial references against the OpenMP kernels, plus one full PDE step.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>

#include "nls/dynamics.hpp"
#include "nls/grid.hpp"
#include "nls/kernels.hpp"

using namespace nls;

namespace {

struct Data {
  Vec diag, kappa, x;
  CVec u, cdiag, out;
  explicit Data(Eigen::Index n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    diag.resize(n);
    kappa.resize(n);
    x.resize(n);
    u.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      diag[i] = d(rng);
      kappa[i] = std::abs(d(rng));
      x[i] = d(rng);
      u[i] = cplx(d(rng), d(rng));
    }
    cdiag = diag.cast<cplx>();
  }
};

template <bool Parallel>
void BM_penta_affine(benchmark::State& st) {
  Data a(st.range(0));
  for (auto _ : st) {
    if constexpr (Parallel)
      kern::penta_affine(a.cdiag, cplx(0, -0.01), -1.0, 0.1, a.u, a.out);
    else
      kern::serial::penta_affine(a.cdiag, cplx(0, -0.01), -1.0, 0.1, a.u, a.out);
    benchmark::DoNotOptimize(a.out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_nonlinear_phase(benchmark::State& st) {
  Data a(st.range(0));
  for (auto _ : st) {
    if constexpr (Parallel)
      kern::nonlinear_phase(a.u, a.kappa, 1e-3);
    else
      kern::serial::nonlinear_phase(a.u, a.kappa, 1e-3);
    benchmark::DoNotOptimize(a.u.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_quartic(benchmark::State& st) {
  Data a(st.range(0));
  for (auto _ : st) {
    double s = Parallel ? kern::quartic(a.u, a.kappa, 0.01) : kern::serial::quartic(a.u, a.kappa, 0.01);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_strang_step(benchmark::State& st) {
  const auto op = build_operator(RadialGrid::make(30.0, static_cast<int>(st.range(0))),
                                 make_potential("gaussian", {{"depth", 20.0}, {"width", 1.0}}));
  StrangStepper step(op, 0.0025, Vec::Zero(op.size()));
  Data a(op.size());
  CVec u = 1e-2 * a.u;
  for (auto _ : st) {
    step.step(u);
    benchmark::DoNotOptimize(u.data());
  }
  st.counters["threads"] = kern::max_threads();
}

}  // namespace

BENCHMARK(BM_penta_affine<false>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_penta_affine<true>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_nonlinear_phase<false>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_nonlinear_phase<true>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_quartic<false>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_quartic<true>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_strang_step)->Arg(1200)->Arg(4800)->Arg(19200);

BENCHMARK_MAIN();
