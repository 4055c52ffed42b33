// Sample out-of-tree backend: the nnb_backend_v1 table over the reference
// kernels. Build it as a shared object and load with --backend plugin:<path>.
// Options string: "name=<display name>" (optional).
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "nnbench/backend_abi.h"
#include "nnbench/kernels.hpp"
#include "nnbench/network.hpp"
#include "nnbench/params.hpp"

namespace {

using namespace nnbench;

struct Ctx {
  std::string name = "sample-plugin";
  std::string error;
};

Tensor from_abi(const nnb_tensor& t) {
  std::vector<std::uint64_t> dims(t.dims, t.dims + t.rank);
  return Tensor(TensorShape(std::move(dims)), std::vector<float>(t.data, t.data + t.count));
}

LayerParams params_from_abi(const LayerSpec& spec, const nnb_tensor* p, std::uint32_t n) {
  const auto layout = param_layout(spec);
  if (layout.size() != n) throw std::runtime_error("parameter count mismatch");
  LayerParams lp;
  for (std::uint32_t i = 0; i < n; ++i) lp.tensors.push_back({layout[i].name, layout[i].role, from_abi(p[i]), {}, {}});
  return lp;
}

void copy_out(const Tensor& t, nnb_tensor* out) {
  if (out->count != t.size()) throw std::runtime_error("output buffer has the wrong size");
  std::memcpy(out->data, t.data.data(), t.size() * sizeof(float));
}

template <class F>
int guarded(void* vctx, F&& f) {
  auto* ctx = static_cast<Ctx*>(vctx);
  try {
    f();
    return NNB_OK;
  } catch (const std::exception& e) {
    ctx->error = e.what();
    return NNB_ERROR;
  }
}

int initialize(void** out, const char* options) {
  auto* ctx = new Ctx;
  if (options && std::strncmp(options, "name=", 5) == 0 && options[5]) ctx->name = options + 5;
  *out = ctx;
  return NNB_OK;
}

int query_capabilities(void* vctx, nnb_capabilities* caps) {
  auto* ctx = static_cast<Ctx*>(vctx);
  std::memset(caps, 0, sizeof *caps);
  caps->abi_version = NNB_ABI_VERSION;
  caps->kinds_mask = (1u << kAllKinds.size()) - 1;
  caps->flags = NNB_CAP_FUSION | NNB_CAP_SPARSE | NNB_CAP_THREAD_SAFE;
  std::strncpy(caps->name, ctx->name.c_str(), sizeof caps->name - 1);
  return NNB_OK;
}

int forward(void* ctx, const char* layer_json, const nnb_tensor* params, std::uint32_t n_params,
            const nnb_tensor* input, const std::uint64_t* switches_in, nnb_tensor* output,
            std::uint64_t* switches_out) {
  return guarded(ctx, [&] {
    const LayerSpec spec = layer_from_json(nlohmann::json::parse(layer_json), "layer");
    const LayerParams lp = params_from_abi(spec, params, n_params);
    std::optional<PoolSwitches> sw;
    if (switches_in) sw = PoolSwitches{std::vector<std::uint64_t>(switches_in, switches_in + input->count)};
    const LayerOutput r = forward_layer(spec, lp, from_abi(*input), sw ? &*sw : nullptr);
    copy_out(r.output, output);
    if (switches_out && r.switches) {
      std::memcpy(switches_out, r.switches->index.data(), r.switches->index.size() * sizeof(std::uint64_t));
    }
  });
}

int forward_fused(void* ctx, const char* layers_json, const nnb_tensor* params, const std::uint32_t* per_layer,
                  std::uint32_t n_layers, const nnb_tensor* input, nnb_tensor* output) {
  return guarded(ctx, [&] {
    const auto arr = nlohmann::json::parse(layers_json);
    if (arr.size() != n_layers) throw std::runtime_error("layer count mismatch");
    Tensor x = from_abi(*input);
    std::size_t offset = 0;
    for (std::uint32_t i = 0; i < n_layers; ++i) {
      const LayerSpec spec = layer_from_json(arr[i], "layers[" + std::to_string(i) + "]");
      const LayerParams lp = params_from_abi(spec, params + offset, per_layer[i]);
      offset += per_layer[i];
      x = forward_layer(spec, lp, x).output;
    }
    copy_out(x, output);
  });
}

void finalize(void* ctx) { delete static_cast<Ctx*>(ctx); }

const char* last_error(void* ctx) { return static_cast<Ctx*>(ctx)->error.c_str(); }

const nnb_backend_v1 kTable = {NNB_ABI_VERSION, initialize, query_capabilities, forward,
                               forward_fused,   finalize,   last_error};

}  // namespace

extern "C" __attribute__((visibility("default"))) const nnb_backend_v1* nnb_get_backend(void) { return &kTable; }
