#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnbench/layer.hpp"
#include "nnbench/tensor.hpp"

namespace nnbench {

struct NetworkDescriptor;

enum class ParamRole : std::uint8_t { weight, bias, gamma, beta };
std::string_view to_string(ParamRole r) noexcept;

struct ParamDesc {
  std::string name;
  ParamRole role;
  TensorShape shape;
};

/// Parameter tensors of a layer in kernel order:
///   Conv   weight [Co, Ci, kh, kw], bias [Co]
///   Deconv weight [Ci, Co, kh, kw], bias [Co]
///   FC     weight [M, K], bias [M]
///   BN     gamma [C], beta [C]
///   LSTM   per direction: w_ih [4H, I], w_hh [4H, H], bias [4H]; gates i, f, o, g
std::vector<ParamDesc> param_layout(const LayerSpec& spec);

struct ParamTensor {
  std::string name;
  ParamRole role = ParamRole::weight;
  Tensor value;
  std::vector<std::uint8_t> mask;      ///< 1 = kept; empty when dense
  std::optional<int> fractional_bits;  ///< set once quantized to fx16
};

struct LayerParams {
  std::vector<ParamTensor> tensors;

  const Tensor& operator[](std::size_t i) const { return tensors.at(i).value; }
  std::size_t size() const noexcept { return tensors.size(); }
  std::uint64_t nonzero_weights() const;
  std::uint64_t total_weights() const;
};

struct ModelParams {
  std::uint64_t seed = 0;
  std::vector<LayerParams> layers;
};

/// Stream layer index used for benchmark inputs (see docs/prng.md).
inline constexpr std::uint64_t kInputStream = 0xFFFFFFFFULL;

/// Synthetic parameters of a single layer; `layer` selects the PRNG stream.
/// Sparse specs are pruned to their density and fx16 specs are quantized.
LayerParams instantiate_layer_params(const LayerSpec& spec, std::uint64_t seed,
                                     std::uint64_t layer = 0);
ModelParams instantiate_params(const LayerSpec& spec, std::uint64_t seed);
ModelParams instantiate_params(const NetworkDescriptor& net, std::uint64_t seed);

/// Keeps exactly round(density * size) entries of every weight tensor, chosen
/// by a seeded Fisher-Yates shuffle; other roles are untouched.
ModelParams sparsify(const ModelParams& params, double density, std::uint64_t seed);
void sparsify_layer(LayerParams& layer, double density, std::uint64_t seed, std::uint64_t layer_index);

/// Largest f with round(max_abs * 2^f) <= 32767; 0 for an all-zero tensor.
int fx16_fractional_bits(const Tensor& t);
/// Round-to-nearest (ties to even) onto the signed 16-bit grid k * 2^-f.
void quantize_tensor_fx16(Tensor& t, int fractional_bits);
ModelParams quantize_fx16(const ModelParams& params);
void quantize_layer_fx16(LayerParams& layer);

}  // namespace nnbench
