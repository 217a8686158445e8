// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>

#include "embalign/kernels.hpp"

using namespace embalign;

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

template <bool Parallel>
void BM_CrossCovariance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Matrix a = gaussian(n, d, 1), b = gaussian(n, d, 2);
  for (auto _ : state) {
    Matrix h = Parallel ? kernels::parallel::cross_covariance(a, b)
                        : kernels::serial::cross_covariance(a, b);
    benchmark::DoNotOptimize(h.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * d * d));
}

template <bool Parallel>
void BM_MapRows(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Matrix x = gaussian(n, d, 3);
  const Matrix r = Matrix::identity(d);
  const std::vector<double> mu(d, 0.5);
  const kernels::RowMap map{r, 1.3, mu, mu};
  for (auto _ : state) {
    Matrix y = Parallel ? kernels::parallel::map_rows(x, map) : kernels::serial::map_rows(x, map);
    benchmark::DoNotOptimize(y.data().data());
  }
}

template <bool Parallel>
void BM_Scores(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Matrix x = gaussian(n, d, 4);
  const auto norms = kernels::serial::row_norms(x);
  const std::vector<double> q(x.row(0).begin(), x.row(0).end());
  for (auto _ : state) {
    auto s = Parallel ? kernels::parallel::scores(x, norms, q, kernels::Similarity::kCosine)
                      : kernels::serial::scores(x, norms, q, kernels::Similarity::kCosine);
    benchmark::DoNotOptimize(s.data());
  }
}

}  // namespace

BENCHMARK(BM_CrossCovariance<false>)->Args({5000, 300})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossCovariance<true>)->Args({5000, 300})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapRows<false>)->Args({20000, 300})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapRows<true>)->Args({20000, 300})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Scores<false>)->Args({100000, 300})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Scores<true>)->Args({100000, 300})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
