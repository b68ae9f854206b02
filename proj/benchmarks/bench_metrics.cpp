#include <benchmark/benchmark.h>

#include <vector>

#include "implausify/metrics.hpp"
#include "implausify/rng.hpp"

namespace {

std::pair<std::vector<double>, std::vector<double>> random_pairs(std::size_t n) {
  implausify::Rng rng(n);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = static_cast<double>(rng.below(64));  // tie-heavy
    ys[i] = rng.uniform01();
  }
  return {std::move(xs), std::move(ys)};
}

void BM_Spearman(benchmark::State& state) {
  const auto [xs, ys] = random_pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(implausify::spearman(xs, ys));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Spearman)->Range(1 << 10, 1 << 17)->Complexity();

void BM_KendallTauB(benchmark::State& state) {
  const auto [xs, ys] = random_pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(implausify::kendall(xs, ys));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTauB)->Range(1 << 10, 1 << 17)->Complexity();

void BM_FleissKappa(benchmark::State& state) {
  implausify::Rng rng(7);
  std::vector<std::vector<int>> matrix(static_cast<std::size_t>(state.range(0)),
                                       std::vector<int>(5));
  for (auto& row : matrix) {
    for (auto& rating : row) rating = static_cast<int>(rng.below(6));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(implausify::fleiss_kappa(matrix));
  }
}
BENCHMARK(BM_FleissKappa)->Arg(300)->Arg(3000);

}  // namespace
