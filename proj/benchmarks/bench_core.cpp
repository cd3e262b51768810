#include <benchmark/benchmark.h>

#include "spikeslab/gls.hpp"
#include "spikeslab/linalg.hpp"
#include "spikeslab/ppca.hpp"
#include "spikeslab/simulate.hpp"

namespace {

using namespace spikeslab;

sim::GlsSimulation gls_instance(int p) {
  sim::GlsSimConfig c;
  c.p_dim = p;
  c.wishart_df = std::max(p, 100);
  c.replicates = 1;
  c.sigma_e2_grid = {0.5};
  return sim::simulate_gls(c, 0, 0);
}

sim::PpcaSimulation ppca_instance(int n, int p) {
  sim::PpcaSimConfig c;
  c.n = n;
  c.p = p;
  c.cluster_sizes = {n / 4, n / 4, n / 4, n - 3 * (n / 4)};
  c.informative_dims = p / 100;
  c.p0 = 0.99;
  c.replicates = 1;
  return sim::simulate_ppca(c, 0);
}

void BM_GlsSparseSweep(benchmark::State& state) {
  const auto sim = gls_instance(static_cast<int>(state.range(0)));
  const GlsProblem problem = sim.problem();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_gls_sparse(problem, {1, 0.0}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GlsSparseSweep)->Arg(100)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GlsNaiveSweep(benchmark::State& state) {
  const auto sim = gls_instance(static_cast<int>(state.range(0)));
  const GlsProblem problem = sim.problem();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_gls_naive(problem, 1e-4, {1, 0.0}));
  }
}
BENCHMARK(BM_GlsNaiveSweep)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PpcaSparseSweep(benchmark::State& state) {
  const auto sim = ppca_instance(500, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_ppca_sparse(sim.problem, {1, std::nullopt}));
  }
}
BENCHMARK(BM_PpcaSparseSweep)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TruncatedSvd(benchmark::State& state) {
  const auto sim = ppca_instance(500, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncated_svd(sim.problem.data(), 2));
  }
}
BENCHMARK(BM_TruncatedSvd)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
