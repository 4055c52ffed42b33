#pragma once
// Test-side oracles written straight from the layer definitions. They share
// no code with the library kernels: plain index arithmetic, double state,
// deconvolution in scatter form.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "nnbench/kernels.hpp"
#include "nnbench/layer.hpp"
#include "nnbench/params.hpp"

namespace oracle {

struct Result {
  std::vector<double> y;
  std::vector<std::uint64_t> switches;  // max pooling only
};

Result conv(const nnbench::LayerSpec& s, const nnbench::LayerParams& p, const nnbench::Tensor& x);
Result deconv(const nnbench::LayerSpec& s, const nnbench::LayerParams& p, const nnbench::Tensor& x);
Result pool(const nnbench::LayerSpec& s, const nnbench::Tensor& x);
Result fc(const nnbench::LayerSpec& s, const nnbench::LayerParams& p, const nnbench::Tensor& x);
Result relu(const nnbench::Tensor& x);
Result sigmoid(const nnbench::Tensor& x);
Result lrn(const nnbench::LayerSpec& s, const nnbench::Tensor& x);
Result bn(const nnbench::LayerSpec& s, const nnbench::LayerParams& p, const nnbench::Tensor& x);
Result unpool(const nnbench::LayerSpec& s, const nnbench::Tensor& x, const std::vector<std::uint64_t>* switches);
/// Hidden and cell state are stored as fp32 between steps, as the layer's
/// tensors are fp32.
Result lstm(const nnbench::LayerSpec& s, const nnbench::LayerParams& p, const nnbench::Tensor& x);

Result forward(const nnbench::LayerSpec& s, const nnbench::LayerParams& p, const nnbench::Tensor& x,
               const std::vector<std::uint64_t>* switches = nullptr);

// Pinned tolerance: |got - want| <= kRelTol * |want| + kAbsFloor. The floor
// only matters for outputs that are exactly zero.
inline constexpr double kRelTol = 1e-6;
inline constexpr double kAbsFloor = 1e-12;

struct Mismatch {
  std::size_t index = 0;
  double got = 0.0, want = 0.0;
};
std::optional<Mismatch> compare(const nnbench::Tensor& got, const std::vector<double>& want);

/// Random valid layer of `kind` with small extents; density < 1 is drawn for
/// a share of conv and fc instances.
nnbench::LayerSpec random_spec(nnbench::LayerKind kind, std::mt19937_64& rng);

/// Random unpool switches consistent with `spec` (one winner per window).
std::vector<std::uint64_t> random_switches(const nnbench::LayerSpec& spec, std::mt19937_64& rng);

}  // namespace oracle
