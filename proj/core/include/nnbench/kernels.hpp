#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nnbench/network.hpp"
#include "nnbench/params.hpp"
#include "nnbench/tensor.hpp"

namespace nnbench {

/// Per pooled output element, the flat index of the winning element in the
/// pooling input (which has the same shape as the matching unpool output).
struct PoolSwitches {
  std::vector<std::uint64_t> index;
  friend bool operator==(const PoolSwitches&, const PoolSwitches&) = default;
};

struct LayerOutput {
  Tensor output;
  std::optional<PoolSwitches> switches;  ///< set by max pooling
};

// Reference kernels. Accumulation is in double in a fixed order and rounded
// to fp32 once per output element; see docs/ for the loop nests.
Tensor forward_conv(const Tensor& input, const LayerParams& params, const LayerSpec& spec);
Tensor forward_deconv(const Tensor& input, const LayerParams& params, const LayerSpec& spec);
LayerOutput forward_pool(const Tensor& input, const LayerSpec& spec);
Tensor forward_fc(const Tensor& input, const LayerParams& params, const LayerSpec& spec);
Tensor forward_activation(const Tensor& input, LayerKind kind);
Tensor forward_lrn(const Tensor& input, const LayerSpec& spec);
Tensor forward_bn(const Tensor& input, const LayerParams& params, const LayerSpec& spec);
Tensor forward_unpool(const Tensor& input, const LayerSpec& spec, const PoolSwitches* switches);
Tensor forward_lstm(const Tensor& input, const LayerParams& params, const LayerSpec& spec);

/// Dispatches on spec.kind. `switches` is required for UnpoolMax.
LayerOutput forward_layer(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                          const PoolSwitches* switches = nullptr);

/// Deterministic switches for a stand-alone max-unpool layer: max-pool a
/// seeded random tensor of the unpool output shape with the same window.
PoolSwitches synthetic_switches(const LayerSpec& unpool_spec, std::uint64_t seed);

/// Deterministic benchmark input for a layer or network.
Tensor benchmark_input(const TensorShape& shape, std::uint64_t seed);

/// Executes one layer of a network; used to run networks on any backend.
using LayerExecutor = std::function<LayerOutput(std::size_t index, const LayerSpec&,
                                                const LayerParams&, const Tensor&,
                                                const PoolSwitches*)>;

struct NetworkRun {
  Tensor output;
  std::vector<Tensor> layer_outputs;  ///< empty unless keep_layer_outputs
};

struct RunNetworkOptions {
  bool keep_layer_outputs = false;
  LayerExecutor executor;  ///< defaults to the reference kernels
};

/// Throws Error("descriptor is analytic-only") for non-executable networks.
NetworkRun run_network(const NetworkDescriptor& net, const ModelParams& params, const Tensor& input,
                       const RunNetworkOptions& options = {});

double mse(const Tensor& a, const Tensor& b);

/// Golden file: 16-byte header ("NBGD", u16 version, u16 rank, u64 count),
/// rank u32 dims, then little-endian fp32 data. See docs/golden-format.md.
void write_golden(const std::filesystem::path& path, const Tensor& t);
Tensor read_golden(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_golden(const Tensor& t);
Tensor decode_golden(std::span<const std::uint8_t> bytes);

/// FNV-1a 64 over the fp32 bit patterns; used in reports as an output digest.
std::uint64_t tensor_digest(const Tensor& t);

}  // namespace nnbench
