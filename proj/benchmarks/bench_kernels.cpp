#include <benchmark/benchmark.h>

#include "nnbench/kernels.hpp"
#include "nnbench/registry.hpp"

using namespace nnbench;

namespace {

void run_config(benchmark::State& state, LayerKind kind, char label) {
  const auto spec = micro_config(kind, label).spec;
  const auto params = instantiate_layer_params(spec, 42);
  const Tensor x = benchmark_input(spec.input_shape, 42);
  std::optional<PoolSwitches> sw;
  if (kind == LayerKind::UnpoolMax) sw = synthetic_switches(spec, 42);
  for (auto _ : state) {
    auto out = forward_layer(spec, params, x, sw ? &*sw : nullptr);
    benchmark::DoNotOptimize(out.output.data.data());
  }
}

void BM_LeNet5(benchmark::State& state) {
  const auto net = lenet5();
  const auto params = instantiate_params(net, 42);
  const Tensor x = benchmark_input(net.input_shape(), 42);
  for (auto _ : state) benchmark::DoNotOptimize(run_network(net, params, x).output.data.data());
}

}  // namespace

BENCHMARK_CAPTURE(run_config, conv_A, LayerKind::Conv, 'A')->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_config, pool_max_A, LayerKind::PoolMax, 'A')->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_config, fc_A, LayerKind::FC, 'A')->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_config, lrn_A, LayerKind::LRN, 'A')->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_config, lstm_A, LayerKind::LSTM, 'A')->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeNet5)->Unit(benchmark::kMillisecond);
