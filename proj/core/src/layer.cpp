#include "nnbench/layer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "nnbench/error.hpp"

namespace nnbench {

namespace {

struct KindName {
  LayerKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 12> kKindNames = {{
    {LayerKind::Conv, "conv"},
    {LayerKind::PoolAvg, "pool_avg"},
    {LayerKind::PoolMax, "pool_max"},
    {LayerKind::FC, "fc"},
    {LayerKind::ReLU, "relu"},
    {LayerKind::Sigmoid, "sigmoid"},
    {LayerKind::LRN, "lrn"},
    {LayerKind::BN, "bn"},
    {LayerKind::Deconv, "deconv"},
    {LayerKind::UnpoolAvg, "unpool_avg"},
    {LayerKind::UnpoolMax, "unpool_max"},
    {LayerKind::LSTM, "lstm"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  out.erase(std::remove(out.begin(), out.end(), '-'), out.end());
  return out;
}

std::string field(const std::string& path, const std::string& name) {
  return path.empty() ? name : path + "." + name;
}

template <class T>
const T& expect_hyper(const LayerSpec& spec, const std::string& path) {
  if (const T* p = std::get_if<T>(&spec.hyper)) return *p;
  throw SpecError(field(path, "hyperparams"),
                  "wrong hyperparameter record for kind " + std::string(to_string(spec.kind)));
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw SpecError(path, message);
}

void require_rank(const LayerSpec& spec, std::size_t rank, const std::string& path) {
  require(spec.input_shape.rank() == rank, field(path, "input_shape"),
          std::string(to_string(spec.kind)) + " expects rank " + std::to_string(rank) + ", got " +
              spec.input_shape.to_string());
}

void check_window(std::uint64_t in, std::uint64_t k, std::uint64_t s, std::uint64_t p,
                  const std::string& path, const char* axis) {
  require(k >= 1, field(path, std::string("hyperparams.kernel_") + axis), "must be >= 1");
  require(s >= 1, field(path, std::string("hyperparams.stride_") + axis), "must be >= 1");
  require(in + 2 * p >= k, field(path, std::string("hyperparams.kernel_") + axis),
          "window larger than padded input");
}

}  // namespace

std::string_view to_string(LayerKind kind) noexcept {
  return kKindNames[kind_index(kind)].name;
}

std::optional<LayerKind> parse_kind(std::string_view name) {
  const std::string n = lower(name);
  for (const auto& kn : kKindNames) {
    std::string canon(kn.name);
    if (n == canon) return kn.kind;
    canon.erase(std::remove(canon.begin(), canon.end(), '_'), canon.end());
    if (n == canon) return kn.kind;
  }
  if (n == "max_pool" || n == "maxpool") return LayerKind::PoolMax;
  if (n == "avg_pool" || n == "avgpool") return LayerKind::PoolAvg;
  if (n == "convolution") return LayerKind::Conv;
  if (n == "deconvolution") return LayerKind::Deconv;
  if (n == "batchnorm") return LayerKind::BN;
  if (n == "innerproduct") return LayerKind::FC;
  return std::nullopt;
}

std::string_view to_string(Precision p) noexcept { return p == Precision::fp32 ? "fp32" : "fx16"; }

std::optional<Precision> parse_precision(std::string_view name) {
  const std::string n = lower(name);
  if (n == "fp32") return Precision::fp32;
  if (n == "fx16") return Precision::fx16;
  return std::nullopt;
}

std::string_view to_string(ComPtt c) noexcept {
  switch (c) {
    case ComPtt::RD: return "RD";
    case ComPtt::EW: return "EW";
    case ComPtt::EL: return "EL";
  }
  return "?";
}

ComPtt computation_pattern(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::ReLU:
    case LayerKind::Sigmoid:
    case LayerKind::BN:
      return ComPtt::EW;
    case LayerKind::Deconv:
    case LayerKind::UnpoolAvg:
    case LayerKind::UnpoolMax:
      return ComPtt::EL;
    default:
      return ComPtt::RD;
  }
}

bool same_workload(const LayerSpec& a, const LayerSpec& b) {
  return a.kind == b.kind && a.input_shape == b.input_shape && a.hyper == b.hyper &&
         a.precision == b.precision && a.sparsity == b.sparsity;
}

Hyperparams default_hyperparams(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv:
    case LayerKind::Deconv:
      return ConvParams{};
    case LayerKind::PoolAvg:
    case LayerKind::PoolMax:
    case LayerKind::UnpoolAvg:
    case LayerKind::UnpoolMax:
      return PoolParams{};
    case LayerKind::FC:
      return FCParams{};
    case LayerKind::LRN:
      return LRNParams{};
    case LayerKind::BN:
      return BNParams{};
    case LayerKind::LSTM:
      return LSTMParams{};
    case LayerKind::ReLU:
    case LayerKind::Sigmoid:
      return NoParams{};
  }
  return NoParams{};
}

std::uint64_t conv_out_extent(std::uint64_t in, std::uint64_t kernel, std::uint64_t stride,
                              std::uint64_t pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

std::uint64_t deconv_out_extent(std::uint64_t in, std::uint64_t kernel, std::uint64_t stride,
                                std::uint64_t pad) {
  return (in - 1) * stride + kernel - 2 * pad;
}

void validate(const LayerSpec& spec, const std::string& path) {
  const auto& in = spec.input_shape;
  require(!in.empty(), field(path, "input_shape"), "must not be empty");
  require(spec.sparsity > 0.0 && spec.sparsity <= 1.0, field(path, "sparsity"),
          "density must lie in (0, 1]");
  require(spec.sparsity == 1.0 || spec.kind == LayerKind::Conv || spec.kind == LayerKind::FC,
          field(path, "sparsity"), "only conv and fc layers may be sparse");

  switch (spec.kind) {
    case LayerKind::Conv:
    case LayerKind::Deconv: {
      const auto& c = expect_hyper<ConvParams>(spec, path);
      require_rank(spec, 4, path);
      require(c.out_channels >= 1, field(path, "hyperparams.out_channels"), "must be >= 1");
      if (spec.kind == LayerKind::Conv) {
        check_window(in[2], c.kernel_h, c.stride_h, c.pad_h, path, "h");
        check_window(in[3], c.kernel_w, c.stride_w, c.pad_w, path, "w");
      } else {
        require(c.kernel_h >= 1 && c.kernel_w >= 1, field(path, "hyperparams.kernel"),
                "must be >= 1");
        require(c.stride_h >= 1 && c.stride_w >= 1, field(path, "hyperparams.stride"),
                "must be >= 1");
        require((in[2] - 1) * c.stride_h + c.kernel_h > 2 * c.pad_h &&
                    (in[3] - 1) * c.stride_w + c.kernel_w > 2 * c.pad_w,
                field(path, "hyperparams.pad"), "padding removes the whole output");
      }
      break;
    }
    case LayerKind::PoolAvg:
    case LayerKind::PoolMax: {
      const auto& p = expect_hyper<PoolParams>(spec, path);
      require_rank(spec, 4, path);
      check_window(in[2], p.kernel_h, p.stride_h, p.pad_h, path, "h");
      check_window(in[3], p.kernel_w, p.stride_w, p.pad_w, path, "w");
      require(p.pad_h < p.kernel_h && p.pad_w < p.kernel_w, field(path, "hyperparams.pad"),
              "padding must be smaller than the window");
      break;
    }
    case LayerKind::UnpoolAvg:
    case LayerKind::UnpoolMax: {
      const auto& p = expect_hyper<PoolParams>(spec, path);
      require_rank(spec, 4, path);
      require(p.kernel_h >= 1 && p.kernel_w >= 1, field(path, "hyperparams.kernel"),
              "must be >= 1");
      require(p.stride_h == p.kernel_h && p.stride_w == p.kernel_w,
              field(path, "hyperparams.stride"), "unpooling requires stride == kernel");
      require(p.pad_h == 0 && p.pad_w == 0, field(path, "hyperparams.pad"),
              "unpooling does not support padding");
      break;
    }
    case LayerKind::FC: {
      const auto& f = expect_hyper<FCParams>(spec, path);
      require(in.rank() >= 2, field(path, "input_shape"), "fc expects [N, ...]");
      require(f.out_features >= 1, field(path, "hyperparams.out_features"), "must be >= 1");
      break;
    }
    case LayerKind::ReLU:
    case LayerKind::Sigmoid:
      expect_hyper<NoParams>(spec, path);
      break;
    case LayerKind::LRN: {
      const auto& l = expect_hyper<LRNParams>(spec, path);
      require_rank(spec, 4, path);
      require(l.local_size >= 1 && l.local_size % 2 == 1, field(path, "hyperparams.local_size"),
              "must be odd and >= 1");
      require(std::isfinite(l.alpha) && l.alpha >= 0.0, field(path, "hyperparams.alpha"),
              "must be finite and >= 0");
      require(std::isfinite(l.beta) && l.beta >= 0.0, field(path, "hyperparams.beta"),
              "must be finite and >= 0");
      require(std::isfinite(l.k) && l.k > 0.0, field(path, "hyperparams.k"), "must be > 0");
      break;
    }
    case LayerKind::BN: {
      const auto& b = expect_hyper<BNParams>(spec, path);
      require(in.rank() >= 2, field(path, "input_shape"), "bn expects [N, C, ...]");
      require(std::isfinite(b.epsilon) && b.epsilon > 0.0, field(path, "hyperparams.epsilon"),
              "must be > 0");
      break;
    }
    case LayerKind::LSTM: {
      const auto& l = expect_hyper<LSTMParams>(spec, path);
      require_rank(spec, 3, path);
      require(l.hidden >= 1, field(path, "hyperparams.hidden"), "must be >= 1");
      require(l.timesteps == in[0], field(path, "hyperparams.timesteps"),
              "must equal input_shape[0] (" + std::to_string(in[0]) + ")");
      break;
    }
  }
}

TensorShape output_shape(const LayerSpec& spec) {
  validate(spec);
  const auto& in = spec.input_shape;
  switch (spec.kind) {
    case LayerKind::Conv: {
      const auto& c = spec.conv();
      return {in[0], c.out_channels, conv_out_extent(in[2], c.kernel_h, c.stride_h, c.pad_h),
              conv_out_extent(in[3], c.kernel_w, c.stride_w, c.pad_w)};
    }
    case LayerKind::Deconv: {
      const auto& c = spec.conv();
      return {in[0], c.out_channels, deconv_out_extent(in[2], c.kernel_h, c.stride_h, c.pad_h),
              deconv_out_extent(in[3], c.kernel_w, c.stride_w, c.pad_w)};
    }
    case LayerKind::PoolAvg:
    case LayerKind::PoolMax: {
      const auto& p = spec.pool();
      return {in[0], in[1], conv_out_extent(in[2], p.kernel_h, p.stride_h, p.pad_h),
              conv_out_extent(in[3], p.kernel_w, p.stride_w, p.pad_w)};
    }
    case LayerKind::UnpoolAvg:
    case LayerKind::UnpoolMax: {
      const auto& p = spec.pool();
      return {in[0], in[1], in[2] * p.kernel_h, in[3] * p.kernel_w};
    }
    case LayerKind::FC:
      return {in[0], spec.fc().out_features};
    case LayerKind::LSTM: {
      const auto& l = spec.lstm();
      return {in[0], in[1], (l.bidirectional ? 2u : 1u) * l.hidden};
    }
    case LayerKind::ReLU:
    case LayerKind::Sigmoid:
    case LayerKind::LRN:
    case LayerKind::BN:
      return in;
  }
  return in;
}

std::string_view to_string(ConfigCategory c) noexcept {
  switch (c) {
    case ConfigCategory::normal: return "normal";
    case ConfigCategory::extreme_small: return "extreme_small";
    case ConfigCategory::extreme_large: return "extreme_large";
  }
  return "?";
}

ConfigClass ConfigClass::from_label(char label) {
  if (label >= 'a' && label <= 'g') label = static_cast<char>(label - 'a' + 'A');
  if (label < 'A' || label > 'G') {
    throw SpecError("config", std::string("unknown configuration label '") + label + "'");
  }
  ConfigClass c;
  c.label = label;
  c.category = label <= 'C'   ? ConfigCategory::normal
               : label == 'D' ? ConfigCategory::extreme_small
                              : ConfigCategory::extreme_large;
  return c;
}

}  // namespace nnbench
