// Parallel kernels against their serial references.
//   bench_kernels --benchmark_filter=pair
// Set OMP_NUM_THREADS to vary the worker count.

#include <benchmark/benchmark.h>

#include <vector>

#include "riesz/kernels.hpp"
#include "riesz/stable.hpp"

using namespace riesz;

namespace {

std::vector<double> path_coords(int d, int n) {
  const auto p = sample_path({d, 2.0}, 1.0, n, seed_for(1, Lane::Path, 0));
  return {p.coords().begin(), p.coords().end()};
}

template <bool Parallel>
void pair_sum(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0)), d = 2;
  const auto X = path_coords(d, n);
  for (auto _ : st) {
    const double v = Parallel ? kernels::band_pair_sum(X, n, d, 1, {}, 0.5)
                              : kernels::band_pair_sum_serial(X, n, d, 1, {}, 0.5);
    benchmark::DoNotOptimize(v);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n) * (n + 1) / 2);
}

template <bool Parallel>
void power_sums(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0)), d = 1, count = 512;
  const auto X = path_coords(d, n);
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 1.0 / n);
  for (auto _ : st) {
    auto v = Parallel ? kernels::grid_power_sums(X, n + 1, d, w, -8.0, 16.0 / count, count)
                      : kernels::grid_power_sums_serial(X, n + 1, d, w, -8.0, 16.0 / count, count);
    benchmark::DoNotOptimize(v.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n + 1) * count);
}

}  // namespace

BENCHMARK(pair_sum<true>)->Name("pair_sum/parallel")->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(pair_sum<false>)->Name("pair_sum/serial")->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(power_sums<true>)->Name("power_sums/parallel")->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(power_sums<false>)->Name("power_sums/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
