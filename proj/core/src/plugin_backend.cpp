#include <dlfcn.h>

#include <cstring>

#include <nlohmann/json.hpp>

#include "abi_util.hpp"
#include "nnbench/backend.hpp"
#include "nnbench/error.hpp"

namespace nnbench {

namespace detail {

nnb_tensor to_abi(const Tensor& t) {
  if (t.shape.rank() > NNB_MAX_RANK) throw ShapeError("backend abi: rank above " + std::to_string(NNB_MAX_RANK));
  nnb_tensor a{};
  a.rank = static_cast<std::uint32_t>(t.shape.rank());
  for (std::size_t i = 0; i < t.shape.rank(); ++i) a.dims[i] = t.shape[i];
  a.count = t.size();
  a.data = const_cast<float*>(t.data.data());
  return a;
}

BackendDescriptor descriptor_from_caps(const nnb_capabilities& caps) {
  BackendDescriptor d;
  d.name.assign(caps.name, strnlen(caps.name, sizeof caps.name));
  for (auto k : kAllKinds) {
    if (caps.kinds_mask & (1u << kind_index(k))) d.kinds.push_back(k);
  }
  d.supports_fusion = caps.flags & NNB_CAP_FUSION;
  d.supports_sparse = caps.flags & NNB_CAP_SPARSE;
  d.thread_safe = caps.flags & NNB_CAP_THREAD_SAFE;
  if (caps.area_mm2 > 0) d.area_mm2 = caps.area_mm2;
  if (caps.power_w > 0) d.power_w = caps.power_w;
  return d;
}

nnb_capabilities caps_from_descriptor(const BackendDescriptor& d) {
  nnb_capabilities c{};
  c.abi_version = NNB_ABI_VERSION;
  for (auto k : d.kinds) c.kinds_mask |= 1u << kind_index(k);
  c.flags = (d.supports_fusion ? NNB_CAP_FUSION : 0u) | (d.supports_sparse ? NNB_CAP_SPARSE : 0u) |
            (d.thread_safe ? NNB_CAP_THREAD_SAFE : 0u);
  c.area_mm2 = d.area_mm2.value_or(0.0);
  c.power_w = d.power_w.value_or(0.0);
  std::strncpy(c.name, d.name.c_str(), sizeof c.name - 1);
  return c;
}

}  // namespace detail

namespace {

class PluginBackend final : public Backend {
 public:
  PluginBackend(const std::filesystem::path& path, const std::string& options) {
    handle_ = dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
    if (!handle_) throw BackendError("cannot load plugin " + path.string() + ": " + dlerror());
    auto entry = reinterpret_cast<nnb_get_backend_fn>(dlsym(handle_, NNB_ENTRY_POINT));
    if (!entry) {
      dlclose(handle_);
      throw BackendError("plugin " + path.string() + " does not export " NNB_ENTRY_POINT);
    }
    api_ = entry();
    if (!api_ || api_->abi_version != NNB_ABI_VERSION || !api_->initialize || !api_->query_capabilities ||
        !api_->forward || !api_->finalize || !api_->last_error) {
      dlclose(handle_);
      throw BackendError("plugin " + path.string() + " has an incompatible nnb_backend_v1 table");
    }
    if (api_->initialize(&ctx_, options.empty() ? nullptr : options.c_str()) != NNB_OK) {
      const std::string msg = ctx_ ? api_->last_error(ctx_) : "initialize failed";
      dlclose(handle_);
      throw BackendError("plugin " + path.string() + ": " + msg);
    }
    nnb_capabilities caps{};
    check(api_->query_capabilities(ctx_, &caps), "query_capabilities");
    desc_ = detail::descriptor_from_caps(caps);
    if (!api_->forward_fused) desc_.supports_fusion = false;
  }

  ~PluginBackend() override {
    if (api_ && ctx_) api_->finalize(ctx_);
    if (handle_) dlclose(handle_);
  }

  const BackendDescriptor& descriptor() const override { return desc_; }

  LayerOutput forward(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                      const PoolSwitches* switches) override {
    if (!desc_.supports(spec.kind)) {
      throw CapabilityError(desc_.name + ": unsupported kind " + std::string(to_string(spec.kind)));
    }
    const std::string js = to_json(spec).dump();
    std::vector<nnb_tensor> ps;
    for (std::size_t i = 0; i < params.size(); ++i) ps.push_back(detail::to_abi(params[i]));
    const nnb_tensor in = detail::to_abi(input);
    LayerOutput out{Tensor(output_shape(spec)), std::nullopt};
    nnb_tensor o = detail::to_abi(out.output);
    std::uint64_t* sw_out = nullptr;
    if (spec.kind == LayerKind::PoolMax) {
      out.switches.emplace().index.resize(out.output.size());
      sw_out = out.switches->index.data();
    }
    const std::uint64_t* sw_in = switches ? switches->index.data() : nullptr;
    check(api_->forward(ctx_, js.c_str(), ps.data(), static_cast<std::uint32_t>(ps.size()), &in, sw_in, &o, sw_out),
          "forward");
    return out;
  }

  Tensor forward_fused(std::span<const LayerSpec> specs, std::span<const LayerParams> params,
                       const Tensor& input) override {
    if (!desc_.supports_fusion) throw CapabilityError(desc_.name + ": fusion not supported");
    check_fusion_chain(specs, params.size());
    nlohmann::json arr = nlohmann::json::array();
    std::vector<nnb_tensor> ps;
    std::vector<std::uint32_t> counts;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      arr.push_back(to_json(specs[i]));
      counts.push_back(static_cast<std::uint32_t>(params[i].size()));
      for (std::size_t k = 0; k < params[i].size(); ++k) ps.push_back(detail::to_abi(params[i][k]));
    }
    const std::string js = arr.dump();
    const nnb_tensor in = detail::to_abi(input);
    Tensor out(output_shape(specs.back()));
    nnb_tensor o = detail::to_abi(out);
    check(api_->forward_fused(ctx_, js.c_str(), ps.data(), counts.data(), static_cast<std::uint32_t>(counts.size()),
                              &in, &o),
          "forward_fused");
    return out;
  }

 private:
  void check(int rc, const char* what) {
    if (rc == NNB_OK) return;
    const std::string msg = std::string(what) + ": " + api_->last_error(ctx_);
    if (rc == NNB_UNSUPPORTED) throw CapabilityError(desc_.name + ": " + msg);
    throw BackendError(desc_.name + ": " + msg);
  }

  void* handle_ = nullptr;
  const nnb_backend_v1* api_ = nullptr;
  void* ctx_ = nullptr;
  BackendDescriptor desc_;
};

}  // namespace

std::unique_ptr<Backend> load_plugin_backend(const std::filesystem::path& path, const std::string& options) {
  return std::make_unique<PluginBackend>(path, options);
}

}  // namespace nnbench
