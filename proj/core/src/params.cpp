#include "nnbench/params.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nnbench/error.hpp"
#include "nnbench/network.hpp"
#include "nnbench/rng.hpp"

namespace nnbench {

std::string_view to_string(ParamRole r) noexcept {
  switch (r) {
    case ParamRole::weight: return "weight";
    case ParamRole::bias: return "bias";
    case ParamRole::gamma: return "gamma";
    case ParamRole::beta: return "beta";
  }
  return "?";
}

std::vector<ParamDesc> param_layout(const LayerSpec& spec) {
  const auto& in = spec.input_shape;
  switch (spec.kind) {
    case LayerKind::Conv: {
      const auto& c = spec.conv();
      return {{"weight", ParamRole::weight, {c.out_channels, in[1], c.kernel_h, c.kernel_w}},
              {"bias", ParamRole::bias, {c.out_channels}}};
    }
    case LayerKind::Deconv: {
      const auto& c = spec.conv();
      return {{"weight", ParamRole::weight, {in[1], c.out_channels, c.kernel_h, c.kernel_w}},
              {"bias", ParamRole::bias, {c.out_channels}}};
    }
    case LayerKind::FC: {
      const std::uint64_t k = in.element_count() / in[0];
      return {{"weight", ParamRole::weight, {spec.fc().out_features, k}},
              {"bias", ParamRole::bias, {spec.fc().out_features}}};
    }
    case LayerKind::BN:
      return {{"gamma", ParamRole::gamma, {in[1]}}, {"beta", ParamRole::beta, {in[1]}}};
    case LayerKind::LSTM: {
      const auto& l = spec.lstm();
      std::vector<ParamDesc> out;
      const char* dirs[] = {"fwd", "bwd"};
      for (int d = 0; d < (l.bidirectional ? 2 : 1); ++d) {
        const std::string p = l.bidirectional ? std::string(dirs[d]) + "." : std::string();
        out.push_back({p + "w_ih", ParamRole::weight, {4 * l.hidden, in[2]}});
        out.push_back({p + "w_hh", ParamRole::weight, {4 * l.hidden, l.hidden}});
        out.push_back({p + "bias", ParamRole::bias, {4 * l.hidden}});
      }
      return out;
    }
    default:
      return {};
  }
}

std::uint64_t LayerParams::nonzero_weights() const {
  std::uint64_t n = 0;
  for (const auto& t : tensors) {
    if (t.role != ParamRole::weight) continue;
    n += static_cast<std::uint64_t>(
        std::count_if(t.value.data.begin(), t.value.data.end(), [](float v) { return v != 0.0f; }));
  }
  return n;
}

std::uint64_t LayerParams::total_weights() const {
  std::uint64_t n = 0;
  for (const auto& t : tensors) {
    if (t.role == ParamRole::weight) n += t.value.size();
  }
  return n;
}

LayerParams instantiate_layer_params(const LayerSpec& spec, std::uint64_t seed,
                                     std::uint64_t layer) {
  validate(spec);
  LayerParams out;
  const auto layout = param_layout(spec);
  for (std::size_t slot = 0; slot < layout.size(); ++slot) {
    const auto& d = layout[slot];
    ParamTensor pt{d.name, d.role, Tensor(d.shape), {}, std::nullopt};
    switch (d.role) {
      case ParamRole::weight: {
        SplitMix64 rng(stream_seed(seed, layer, slot));
        for (auto& v : pt.value.data) v = synthetic_weight(rng);
        break;
      }
      case ParamRole::gamma:
        std::fill(pt.value.data.begin(), pt.value.data.end(), 1.0f);
        break;
      case ParamRole::bias:
      case ParamRole::beta:
        break;
    }
    out.tensors.push_back(std::move(pt));
  }
  if (spec.sparsity < 1.0) sparsify_layer(out, spec.sparsity, seed, layer);
  if (spec.precision == Precision::fx16) quantize_layer_fx16(out);
  return out;
}

ModelParams instantiate_params(const LayerSpec& spec, std::uint64_t seed) {
  ModelParams p;
  p.seed = seed;
  p.layers.push_back(instantiate_layer_params(spec, seed, 0));
  return p;
}

ModelParams instantiate_params(const NetworkDescriptor& net, std::uint64_t seed) {
  validate_network(net);
  ModelParams p;
  p.seed = seed;
  p.layers.reserve(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    p.layers.push_back(instantiate_layer_params(net.layers[i], seed, i));
  }
  return p;
}

void sparsify_layer(LayerParams& layer, double density, std::uint64_t seed,
                    std::uint64_t layer_index) {
  if (!(density > 0.0 && density <= 1.0)) {
    throw SpecError("density", "must lie in (0, 1], got " + std::to_string(density));
  }
  if (density == 1.0) return;
  for (std::size_t slot = 0; slot < layer.tensors.size(); ++slot) {
    auto& t = layer.tensors[slot];
    if (t.role != ParamRole::weight) continue;
    const std::uint64_t size = t.value.size();
    const auto keep = static_cast<std::uint64_t>(std::llround(density * static_cast<double>(size)));
    // Partial Fisher-Yates: the first `keep` entries of the permutation survive.
    std::vector<std::uint64_t> perm(size);
    std::iota(perm.begin(), perm.end(), std::uint64_t{0});
    SplitMix64 rng(stream_seed(seed, layer_index, 0x8000 | slot));
    for (std::uint64_t i = 0; i < keep && i + 1 < size; ++i) {
      const std::uint64_t j = i + rng.next_below(size - i);
      std::swap(perm[i], perm[j]);
    }
    std::vector<std::uint8_t> mask(size, 0);
    for (std::uint64_t i = 0; i < keep; ++i) mask[perm[i]] = 1;
    if (!t.mask.empty()) {
      for (std::uint64_t i = 0; i < size; ++i) mask[i] &= t.mask[i];
    }
    for (std::uint64_t i = 0; i < size; ++i) {
      if (!mask[i]) t.value.data[i] = 0.0f;
    }
    t.mask = std::move(mask);
  }
}

ModelParams sparsify(const ModelParams& params, double density, std::uint64_t seed) {
  ModelParams out = params;
  for (std::size_t i = 0; i < out.layers.size(); ++i) sparsify_layer(out.layers[i], density, seed, i);
  return out;
}

int fx16_fractional_bits(const Tensor& t) {
  double max_abs = 0.0;
  for (float v : t.data) max_abs = std::max(max_abs, std::fabs(static_cast<double>(v)));
  if (max_abs == 0.0) return 0;
  int f = static_cast<int>(std::floor(std::log2(32767.0 / max_abs)));
  while (std::nearbyint(std::ldexp(max_abs, f)) > 32767.0) --f;
  while (std::nearbyint(std::ldexp(max_abs, f + 1)) <= 32767.0) ++f;
  return f;
}

void quantize_tensor_fx16(Tensor& t, int fractional_bits) {
  for (auto& v : t.data) {
    double q = std::nearbyint(std::ldexp(static_cast<double>(v), fractional_bits));
    q = std::clamp(q, -32768.0, 32767.0);
    v = static_cast<float>(std::ldexp(q, -fractional_bits));
  }
}

void quantize_layer_fx16(LayerParams& layer) {
  for (auto& t : layer.tensors) {
    if (t.role != ParamRole::weight) continue;
    const int f = fx16_fractional_bits(t.value);
    quantize_tensor_fx16(t.value, f);
    t.fractional_bits = f;
  }
}

ModelParams quantize_fx16(const ModelParams& params) {
  ModelParams out = params;
  for (auto& l : out.layers) quantize_layer_fx16(l);
  return out;
}

}  // namespace nnbench
