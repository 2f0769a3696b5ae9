// Serial reference against the OpenMP path for the two data-parallel kernels.
// The second benchmark argument is the worker count; 0 selects the serial loop.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "heatflow/kernels.hpp"

using namespace heatflow;

namespace {

Execution execution(int jobs) { return jobs == 0 ? Execution::serial() : Execution::openmp(jobs); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return g;
}

void BM_ScanMutual(benchmark::State& state) {
  const MixtureModel m = MixtureModel::create_1d({0.2, 0.5, 0.3}, {-1, 0.3, 2}, {0.05, 0.4, 0.2});
  const std::vector<double> grid = log_grid(0.01, 10, static_cast<int>(state.range(0)));
  const QuadratureSpec spec;
  const Execution exec = execution(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    MutualScan s = scan_mutual(m, grid, spec, exec);
    benchmark::DoNotOptimize(s.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogConcavityProfile(benchmark::State& state) {
  const MixtureModel m = MixtureModel::create_1d({0.2, 0.5, 0.3}, {-1, 0.3, 2}, {0.05, 0.4, 0.2});
  std::vector<double> ys(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = -8.0 + 16.0 * double(i) / double(ys.size() - 1);
  const Execution exec = execution(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    std::vector<double> a = log_concavity_profile(m, ys, exec);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ScanMutual)->ArgsProduct({{32, 128}, {0, 1, 2, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LogConcavityProfile)
    ->ArgsProduct({{4096, 65536}, {0, 1, 2, 4}})
    ->Unit(benchmark::kMicrosecond)
    ->UseRealTime();

BENCHMARK_MAIN();
