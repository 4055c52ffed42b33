#include <benchmark/benchmark.h>

#include "nnbench/characterize.hpp"
#include "nnbench/registry.hpp"
#include "nnbench/trace.hpp"

using namespace nnbench;

namespace {

void BM_CountingTrace(benchmark::State& state, LayerKind kind) {
  const auto spec = micro_config(kind, 'A').spec;
  const auto params = instantiate_layer_params(spec, 42);
  const Tensor x = benchmark_input(spec.input_shape, 42);
  for (auto _ : state) {
    CountingSink sink;
    trace_layer(spec, params, x, sink);
    benchmark::DoNotOptimize(sink.reads());
  }
}

void BM_Characterize(benchmark::State& state, LayerKind kind) {
  const auto spec = micro_config(kind, 'A').spec;
  for (auto _ : state) benchmark::DoNotOptimize(characterize_spec(spec, 42).mem_acc);
}

}  // namespace

BENCHMARK_CAPTURE(BM_CountingTrace, conv, LayerKind::Conv)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CountingTrace, fc, LayerKind::FC)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Characterize, conv, LayerKind::Conv)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Characterize, pool_max, LayerKind::PoolMax)->Unit(benchmark::kMillisecond);
