#include <benchmark/benchmark.h>

#include <random>

#include "nnbench/reuse.hpp"

using namespace nnbench;

namespace {

std::vector<std::uint64_t> random_trace(std::size_t n, std::uint64_t keys) {
  std::mt19937_64 rng(1);
  std::vector<std::uint64_t> t(n);
  for (auto& v : t) v = rng() % keys;
  return t;
}

void BM_ReuseFast(benchmark::State& state) {
  const auto t = random_trace(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(reuse_distances_fast(t).data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReuseNaive(benchmark::State& state) {
  const auto t = random_trace(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(reuse_distances_naive(t).data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ReuseFast)->Args({1 << 16, 64})->Args({1 << 20, 1 << 12})->Args({1 << 20, 1 << 18});
BENCHMARK(BM_ReuseNaive)->Args({1 << 14, 64})->Args({1 << 14, 1 << 10});
