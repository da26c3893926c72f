// Serial reference versus OpenMP backend for the history kernels.
// Arguments: field length n, history rows m.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "viscowave/parallel_kernels.hpp"

namespace k = viscowave::kernels;

namespace {

struct Data {
  std::vector<double> rows, weights, current, coeff, out;
  std::size_t n;

  Data(std::size_t n_, std::size_t m) : n(n_) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    rows.resize(n * m);
    for (double& x : rows) x = d(rng);
    weights.resize(m);
    for (double& x : weights) x = 0.5 + 0.5 * d(rng);
    current.resize(n);
    for (double& x : current) x = d(rng);
    coeff.assign(n + 1, 1.0);
    out.assign(n, 0.0);
  }
};

template <k::Backend B>
void BM_HistoryCombination(benchmark::State& st) {
  Data d(st.range(0), st.range(1));
  for (auto _ : st) {
    k::history_combination(B, d.rows, d.n, d.weights, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  st.SetItemsProcessed(st.iterations() * d.rows.size());
}

template <k::Backend B>
void BM_DifferenceEnergy(benchmark::State& st) {
  Data d(st.range(0), st.range(1));
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        k::weighted_difference_energy(B, d.rows, d.n, d.weights, d.current, d.coeff, 0.01));
  }
  st.SetItemsProcessed(st.iterations() * d.rows.size());
}

template <k::Backend B>
void BM_DifferenceSum(benchmark::State& st) {
  Data d(st.range(0), st.range(1));
  for (auto _ : st) {
    k::weighted_difference_sum(B, d.rows, d.n, d.weights, d.current, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  st.SetItemsProcessed(st.iterations() * d.rows.size());
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({128, 2000})->Args({256, 4000})->Args({1024, 4000});
}

}  // namespace

BENCHMARK(BM_HistoryCombination<k::Backend::kSerial>)->Apply(sizes);
BENCHMARK(BM_HistoryCombination<k::Backend::kOpenMP>)->Apply(sizes);
BENCHMARK(BM_DifferenceEnergy<k::Backend::kSerial>)->Apply(sizes);
BENCHMARK(BM_DifferenceEnergy<k::Backend::kOpenMP>)->Apply(sizes);
BENCHMARK(BM_DifferenceSum<k::Backend::kSerial>)->Apply(sizes);
BENCHMARK(BM_DifferenceSum<k::Backend::kOpenMP>)->Apply(sizes);

BENCHMARK_MAIN();
