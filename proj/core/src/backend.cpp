#include "nnbench/backend.hpp"

#include <algorithm>
#include <cmath>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "nnbench/error.hpp"

namespace nnbench {

bool BackendDescriptor::supports(LayerKind k) const {
  return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

nlohmann::json to_json(const BackendDescriptor& d) {
  using nlohmann::json;
  json kinds = json::array();
  for (auto k : d.kinds) kinds.push_back(to_string(k));
  return {{"name", d.name},
          {"kinds", kinds},
          {"supports_fusion", d.supports_fusion},
          {"supports_sparse", d.supports_sparse},
          {"thread_safe", d.thread_safe},
          {"area_mm2", d.area_mm2 ? json(*d.area_mm2) : json(nullptr)},
          {"power_w", d.power_w ? json(*d.power_w) : json(nullptr)}};
}

BackendDescriptor backend_descriptor_from_json(const nlohmann::json& j) {
  BackendDescriptor d;
  d.name = j.at("name").get<std::string>();
  for (const auto& k : j.at("kinds")) {
    auto kind = parse_kind(k.get<std::string>());
    if (!kind) throw FormatError("backend descriptor: unknown kind " + k.dump());
    d.kinds.push_back(*kind);
  }
  d.supports_fusion = j.at("supports_fusion").get<bool>();
  d.supports_sparse = j.at("supports_sparse").get<bool>();
  d.thread_safe = j.at("thread_safe").get<bool>();
  if (j.contains("area_mm2") && !j["area_mm2"].is_null()) d.area_mm2 = j["area_mm2"].get<double>();
  if (j.contains("power_w") && !j["power_w"].is_null()) d.power_w = j["power_w"].get<double>();
  return d;
}

void check_fusion_chain(std::span<const LayerSpec> specs, std::size_t param_count) {
  if (specs.empty()) throw Error("forward_fused: empty layer list");
  if (param_count != specs.size()) {
    throw Error("forward_fused: " + std::to_string(specs.size()) + " layers but " + std::to_string(param_count) +
                " parameter sets");
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    validate(specs[i], "fused[" + std::to_string(i) + "]");
    if (specs[i].kind == LayerKind::UnpoolMax) throw CapabilityError("forward_fused: max-unpool cannot be fused");
    if (i > 0 && output_shape(specs[i - 1]).element_count() != specs[i].input_shape.element_count()) {
      throw ShapeError("forward_fused: layer " + std::to_string(i - 1) + " output " +
                       output_shape(specs[i - 1]).to_string() + " does not feed layer " + std::to_string(i) +
                       " input " + specs[i].input_shape.to_string());
    }
  }
}

Tensor Backend::forward_fused(std::span<const LayerSpec> specs, std::span<const LayerParams> params,
                              const Tensor& input) {
  if (!descriptor().supports_fusion) throw CapabilityError(descriptor().name + ": fusion not supported");
  check_fusion_chain(specs, params.size());
  Tensor cur = input;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (cur.shape != specs[i].input_shape) cur = cur.reshaped(specs[i].input_shape);
    cur = forward(specs[i], params[i], cur, nullptr).output;
  }
  return cur;
}

namespace {

class ReferenceBackend final : public Backend {
 public:
  ReferenceBackend() {
    desc_.name = "reference";
    desc_.kinds.assign(kAllKinds.begin(), kAllKinds.end());
    desc_.supports_fusion = true;
    desc_.supports_sparse = true;
    desc_.thread_safe = true;
  }
  const BackendDescriptor& descriptor() const override { return desc_; }
  LayerOutput forward(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                      const PoolSwitches* switches) override {
    return forward_layer(spec, params, input, switches);
  }

 private:
  BackendDescriptor desc_;
};

// ---- naive backend -------------------------------------------------------------
// Written independently of the reference nests: direct loops, fp32
// accumulators, deconvolution in scatter form.

Tensor naive_conv(const Tensor& x, const LayerParams& p, const LayerSpec& s) {
  const auto& c = s.conv();
  const TensorShape os = output_shape(s);
  const auto N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3];
  const auto Co = c.out_channels, Ho = os[2], Wo = os[3];
  Tensor y(os);
  for (std::uint64_t n = 0; n < N; ++n)
    for (std::uint64_t o = 0; o < Co; ++o)
      for (std::uint64_t oh = 0; oh < Ho; ++oh)
        for (std::uint64_t ow = 0; ow < Wo; ++ow) {
          float acc = p[1].data[o];
          for (std::uint64_t ci = 0; ci < C; ++ci)
            for (std::uint64_t r = 0; r < c.kernel_h; ++r)
              for (std::uint64_t q = 0; q < c.kernel_w; ++q) {
                const auto ih = static_cast<std::int64_t>(oh * c.stride_h + r) - static_cast<std::int64_t>(c.pad_h);
                const auto iw = static_cast<std::int64_t>(ow * c.stride_w + q) - static_cast<std::int64_t>(c.pad_w);
                if (ih < 0 || iw < 0 || ih >= static_cast<std::int64_t>(H) || iw >= static_cast<std::int64_t>(W)) continue;
                acc += p[0].data[((o * C + ci) * c.kernel_h + r) * c.kernel_w + q] *
                       x.data[((n * C + ci) * H + static_cast<std::uint64_t>(ih)) * W + static_cast<std::uint64_t>(iw)];
              }
          y.data[((n * Co + o) * Ho + oh) * Wo + ow] = acc;
        }
  return y;
}

Tensor naive_deconv(const Tensor& x, const LayerParams& p, const LayerSpec& s) {
  const auto& c = s.conv();
  const TensorShape os = output_shape(s);
  const auto N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3];
  const auto Co = c.out_channels, Ho = os[2], Wo = os[3];
  Tensor y(os);
  for (std::uint64_t n = 0; n < N; ++n)
    for (std::uint64_t o = 0; o < Co; ++o)
      for (std::uint64_t i = 0; i < Ho * Wo; ++i) y.data[(n * Co + o) * Ho * Wo + i] = p[1].data[o];
  for (std::uint64_t n = 0; n < N; ++n)
    for (std::uint64_t ci = 0; ci < C; ++ci)
      for (std::uint64_t h = 0; h < H; ++h)
        for (std::uint64_t w = 0; w < W; ++w) {
          const float v = x.data[((n * C + ci) * H + h) * W + w];
          for (std::uint64_t o = 0; o < Co; ++o)
            for (std::uint64_t r = 0; r < c.kernel_h; ++r)
              for (std::uint64_t q = 0; q < c.kernel_w; ++q) {
                const auto oh = static_cast<std::int64_t>(h * c.stride_h + r) - static_cast<std::int64_t>(c.pad_h);
                const auto ow = static_cast<std::int64_t>(w * c.stride_w + q) - static_cast<std::int64_t>(c.pad_w);
                if (oh < 0 || ow < 0 || oh >= static_cast<std::int64_t>(Ho) || ow >= static_cast<std::int64_t>(Wo)) continue;
                y.data[((n * Co + o) * Ho + static_cast<std::uint64_t>(oh)) * Wo + static_cast<std::uint64_t>(ow)] +=
                    v * p[0].data[((ci * Co + o) * c.kernel_h + r) * c.kernel_w + q];
              }
        }
  return y;
}

LayerOutput naive_pool(const Tensor& x, const LayerSpec& s) {
  const auto& pp = s.pool();
  const TensorShape os = output_shape(s);
  const auto NC = x.shape[0] * x.shape[1], H = x.shape[2], W = x.shape[3], Ho = os[2], Wo = os[3];
  const bool is_max = s.kind == LayerKind::PoolMax;
  LayerOutput r{Tensor(os), std::nullopt};
  if (is_max) r.switches.emplace().index.assign(os.element_count(), 0);
  for (std::uint64_t nc = 0; nc < NC; ++nc)
    for (std::uint64_t oh = 0; oh < Ho; ++oh)
      for (std::uint64_t ow = 0; ow < Wo; ++ow) {
        float best = 0.0f, sum = 0.0f;
        std::uint64_t arg = 0, cnt = 0;
        for (std::uint64_t i = 0; i < pp.kernel_h; ++i)
          for (std::uint64_t j = 0; j < pp.kernel_w; ++j) {
            const auto h = static_cast<std::int64_t>(oh * pp.stride_h + i) - static_cast<std::int64_t>(pp.pad_h);
            const auto w = static_cast<std::int64_t>(ow * pp.stride_w + j) - static_cast<std::int64_t>(pp.pad_w);
            if (h < 0 || w < 0 || h >= static_cast<std::int64_t>(H) || w >= static_cast<std::int64_t>(W)) continue;
            const auto idx = (nc * H + static_cast<std::uint64_t>(h)) * W + static_cast<std::uint64_t>(w);
            const float v = x.data[idx];
            if (cnt == 0 || v > best) {
              best = v;
              arg = idx;
            }
            sum += v;
            ++cnt;
          }
        const auto o = (nc * Ho + oh) * Wo + ow;
        if (is_max) {
          r.output.data[o] = best;
          r.switches->index[o] = arg;
        } else {
          r.output.data[o] = sum / static_cast<float>(cnt);
        }
      }
  return r;
}

Tensor naive_fc(const Tensor& x, const LayerParams& p, const LayerSpec& s) {
  const auto N = x.shape[0], K = x.size() / N, M = s.fc().out_features;
  Tensor y(TensorShape{N, M});
  for (std::uint64_t n = 0; n < N; ++n)
    for (std::uint64_t m = 0; m < M; ++m) {
      float acc = p[1].data[m];
      for (std::uint64_t k = 0; k < K; ++k) acc += p[0].data[m * K + k] * x.data[n * K + k];
      y.data[n * M + m] = acc;
    }
  return y;
}

Tensor naive_lrn(const Tensor& x, const LayerSpec& s) {
  const auto& l = s.lrn();
  const auto N = x.shape[0], C = x.shape[1], S = x.shape[2] * x.shape[3];
  const auto half = static_cast<std::int64_t>(l.local_size / 2);
  Tensor y(x.shape);
  for (std::uint64_t n = 0; n < N; ++n)
    for (std::uint64_t c = 0; c < C; ++c)
      for (std::uint64_t i = 0; i < S; ++i) {
        float sum = 0.0f;
        for (std::int64_t d = -half; d <= half; ++d) {
          const auto cc = static_cast<std::int64_t>(c) + d;
          if (cc < 0 || cc >= static_cast<std::int64_t>(C)) continue;
          const float v = x.data[(n * C + static_cast<std::uint64_t>(cc)) * S + i];
          sum += v * v;
        }
        const auto o = (n * C + c) * S + i;
        y.data[o] = x.data[o] / std::pow(static_cast<float>(l.k) + static_cast<float>(l.alpha / static_cast<double>(l.local_size)) * sum,
                                         static_cast<float>(l.beta));
      }
  return y;
}

Tensor naive_bn(const Tensor& x, const LayerParams& p, const LayerSpec& s) {
  const auto N = x.shape[0], C = x.shape[1], S = x.size() / (N * C);
  const auto M = static_cast<float>(N * S);
  Tensor y(x.shape);
  for (std::uint64_t c = 0; c < C; ++c) {
    float mean = 0.0f, var = 0.0f;
    for (std::uint64_t n = 0; n < N; ++n)
      for (std::uint64_t i = 0; i < S; ++i) mean += x.data[(n * C + c) * S + i];
    mean /= M;
    for (std::uint64_t n = 0; n < N; ++n)
      for (std::uint64_t i = 0; i < S; ++i) {
        const float d = x.data[(n * C + c) * S + i] - mean;
        var += d * d;
      }
    var /= M;
    const float inv = 1.0f / std::sqrt(var + static_cast<float>(s.bn().epsilon));
    for (std::uint64_t n = 0; n < N; ++n)
      for (std::uint64_t i = 0; i < S; ++i) {
        const auto o = (n * C + c) * S + i;
        y.data[o] = (x.data[o] - mean) * inv * p[0].data[c] + p[1].data[c];
      }
  }
  return y;
}

Tensor naive_unpool(const Tensor& x, const LayerSpec& s, const PoolSwitches* sw) {
  const auto& pp = s.pool();
  const TensorShape os = output_shape(s);
  Tensor y(os);
  if (s.kind == LayerKind::UnpoolMax) {
    if (!sw || sw->index.size() != x.size()) throw ShapeError("naive unpool_max: bad switches");
    for (std::uint64_t i = 0; i < x.size(); ++i) y.data.at(sw->index[i]) = x.data[i];
    return y;
  }
  const auto NC = x.shape[0] * x.shape[1], H = x.shape[2], W = x.shape[3], Wo = os[3];
  const float area = static_cast<float>(pp.kernel_h * pp.kernel_w);
  for (std::uint64_t nc = 0; nc < NC; ++nc)
    for (std::uint64_t h = 0; h < H; ++h)
      for (std::uint64_t w = 0; w < W; ++w)
        for (std::uint64_t r = 0; r < pp.kernel_h; ++r)
          for (std::uint64_t q = 0; q < pp.kernel_w; ++q)
            y.data[(nc * os[2] + h * pp.kernel_h + r) * Wo + w * pp.kernel_w + q] = x.data[(nc * H + h) * W + w] / area;
  return y;
}

class NaiveBackend final : public Backend {
 public:
  NaiveBackend() {
    desc_.name = "naive";
    for (auto k : kAllKinds) {
      if (k != LayerKind::LSTM) desc_.kinds.push_back(k);
    }
    desc_.supports_sparse = true;
  }
  const BackendDescriptor& descriptor() const override { return desc_; }

  LayerOutput forward(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                      const PoolSwitches* switches) override {
    if (!desc_.supports(spec.kind)) throw CapabilityError("naive: unsupported kind " + std::string(to_string(spec.kind)));
    if (input.shape != spec.input_shape) throw ShapeError("naive: input shape mismatch");
    LayerOutput out;
    for (int rep = 0; rep < kRepeat; ++rep) out = once(spec, params, input, switches);
    return out;
  }

 private:
  static constexpr int kRepeat = 3;

  static LayerOutput once(const LayerSpec& spec, const LayerParams& p, const Tensor& x, const PoolSwitches* sw) {
    switch (spec.kind) {
      case LayerKind::Conv: return {naive_conv(x, p, spec), std::nullopt};
      case LayerKind::Deconv: return {naive_deconv(x, p, spec), std::nullopt};
      case LayerKind::PoolAvg:
      case LayerKind::PoolMax: return naive_pool(x, spec);
      case LayerKind::FC: return {naive_fc(x, p, spec), std::nullopt};
      case LayerKind::ReLU: {
        Tensor y(x.shape);
        for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = std::max(x.data[i], 0.0f);
        return {std::move(y), std::nullopt};
      }
      case LayerKind::Sigmoid: {
        Tensor y(x.shape);
        for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = 1.0f / (1.0f + std::exp(-x.data[i]));
        return {std::move(y), std::nullopt};
      }
      case LayerKind::LRN: return {naive_lrn(x, spec), std::nullopt};
      case LayerKind::BN: return {naive_bn(x, p, spec), std::nullopt};
      case LayerKind::UnpoolAvg:
      case LayerKind::UnpoolMax: return {naive_unpool(x, spec, sw), std::nullopt};
      case LayerKind::LSTM: break;
    }
    throw CapabilityError("naive: unsupported kind");
  }

  BackendDescriptor desc_;
};

}  // namespace

std::unique_ptr<Backend> make_reference_backend() { return std::make_unique<ReferenceBackend>(); }
std::unique_ptr<Backend> make_naive_backend() { return std::make_unique<NaiveBackend>(); }

std::filesystem::path default_worker_path() {
  if (const char* env = std::getenv("NNBENCH_WORKER"); env && *env) return env;
  std::error_code ec;
  const auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) return self.parent_path() / "nnbench_worker";
  return "nnbench_worker";
}

std::unique_ptr<Backend> open_backend(std::string_view name) {
  if (name == "reference") return make_reference_backend();
  if (name == "naive") return make_naive_backend();
  if (name.rfind("plugin:", 0) == 0) return load_plugin_backend(std::string(name.substr(7)));
  if (name.rfind("worker:", 0) == 0) {
    const std::string inner(name.substr(7));
    if (inner.empty() || inner.rfind("worker:", 0) == 0) throw SpecError("backend", "invalid worker backend '" + std::string(name) + "'");
    return make_worker_backend(default_worker_path(), inner);
  }
  throw SpecError("backend", "unknown backend '" + std::string(name) +
                                 "' (expected reference, naive, plugin:<path> or worker:<name>)");
}

}  // namespace nnbench
