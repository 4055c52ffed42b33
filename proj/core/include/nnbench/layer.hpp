#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "nnbench/tensor.hpp"

namespace nnbench {

enum class LayerKind : std::uint8_t {
  Conv,
  PoolAvg,
  PoolMax,
  FC,
  ReLU,
  Sigmoid,
  LRN,
  BN,
  Deconv,
  UnpoolAvg,
  UnpoolMax,
  LSTM,
};

/// Fixed slot order shared by feature vectors, CSV output and the registry.
inline constexpr std::array<LayerKind, 12> kAllKinds = {
    LayerKind::Conv,    LayerKind::PoolAvg,   LayerKind::PoolMax,   LayerKind::FC,
    LayerKind::ReLU,    LayerKind::Sigmoid,   LayerKind::LRN,       LayerKind::BN,
    LayerKind::Deconv,  LayerKind::UnpoolAvg, LayerKind::UnpoolMax, LayerKind::LSTM,
};

inline constexpr std::size_t kind_index(LayerKind k) noexcept { return static_cast<std::size_t>(k); }

std::string_view to_string(LayerKind kind) noexcept;
/// Accepts canonical names ("conv", "pool_max", ...) case-insensitively plus a
/// few aliases ("relu", "poolmax", "max_pool").
std::optional<LayerKind> parse_kind(std::string_view name);

enum class Precision : std::uint8_t { fp32, fx16 };
std::string_view to_string(Precision p) noexcept;
std::optional<Precision> parse_precision(std::string_view name);

/// Computation pattern: reduction, element-wise, enlargement.
enum class ComPtt : std::uint8_t { RD, EW, EL };
std::string_view to_string(ComPtt c) noexcept;
ComPtt computation_pattern(LayerKind kind) noexcept;

/// Conv and Deconv.
struct ConvParams {
  std::uint64_t out_channels = 1;
  std::uint64_t kernel_h = 1, kernel_w = 1;
  std::uint64_t stride_h = 1, stride_w = 1;
  std::uint64_t pad_h = 0, pad_w = 0;
  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

/// Pooling and unpooling. Unpooling requires stride == kernel and no padding.
struct PoolParams {
  std::uint64_t kernel_h = 2, kernel_w = 2;
  std::uint64_t stride_h = 2, stride_w = 2;
  std::uint64_t pad_h = 0, pad_w = 0;
  friend bool operator==(const PoolParams&, const PoolParams&) = default;
};

struct FCParams {
  std::uint64_t out_features = 1;
  friend bool operator==(const FCParams&, const FCParams&) = default;
};

/// Cross-channel LRN: y = x / (k + alpha/local_size * sum x^2)^beta.
struct LRNParams {
  std::uint64_t local_size = 5;
  double alpha = 1e-4;
  double beta = 0.75;
  double k = 1.0;
  friend bool operator==(const LRNParams&, const LRNParams&) = default;
};

struct BNParams {
  double epsilon = 1e-5;
  friend bool operator==(const BNParams&, const BNParams&) = default;
};

struct LSTMParams {
  std::uint64_t hidden = 1;
  std::uint64_t timesteps = 1;
  bool bidirectional = false;
  friend bool operator==(const LSTMParams&, const LSTMParams&) = default;
};

struct NoParams {
  friend bool operator==(const NoParams&, const NoParams&) = default;
};

using Hyperparams =
    std::variant<NoParams, ConvParams, PoolParams, FCParams, LRNParams, BNParams, LSTMParams>;

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::ReLU;
  TensorShape input_shape;
  Hyperparams hyper;
  Precision precision = Precision::fp32;
  double sparsity = 1.0;  ///< weight density in (0, 1]

  const ConvParams& conv() const { return std::get<ConvParams>(hyper); }
  const PoolParams& pool() const { return std::get<PoolParams>(hyper); }
  const FCParams& fc() const { return std::get<FCParams>(hyper); }
  const LRNParams& lrn() const { return std::get<LRNParams>(hyper); }
  const BNParams& bn() const { return std::get<BNParams>(hyper); }
  const LSTMParams& lstm() const { return std::get<LSTMParams>(hyper); }

  bool is_sparse() const noexcept { return sparsity < 1.0; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Equality of everything that determines the workload (name ignored).
bool same_workload(const LayerSpec& a, const LayerSpec& b);

/// Default hyperparameter record for a kind.
Hyperparams default_hyperparams(LayerKind kind);

/// Throws SpecError (with `path` prefixed to field names) when the layer is
/// invalid or yields an empty output.
void validate(const LayerSpec& spec, const std::string& path = {});

/// Output shape under the shape rules; validates first.
TensorShape output_shape(const LayerSpec& spec);

/// Conv output extent along one axis: (in + 2*pad - kernel) / stride + 1.
std::uint64_t conv_out_extent(std::uint64_t in, std::uint64_t kernel, std::uint64_t stride,
                              std::uint64_t pad);
/// Deconv output extent: (in - 1) * stride - 2 * pad + kernel.
std::uint64_t deconv_out_extent(std::uint64_t in, std::uint64_t kernel, std::uint64_t stride,
                                std::uint64_t pad);

enum class ConfigCategory : std::uint8_t { normal, extreme_small, extreme_large };
std::string_view to_string(ConfigCategory c) noexcept;

struct ConfigClass {
  char label = 'A';  ///< 'A'..'G'
  ConfigCategory category = ConfigCategory::normal;

  /// A-C normal, D extreme small, E-G extreme large.
  static ConfigClass from_label(char label);
  friend bool operator==(const ConfigClass&, const ConfigClass&) = default;
};

}  // namespace nnbench
