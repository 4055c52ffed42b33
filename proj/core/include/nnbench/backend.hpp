#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nnbench/kernels.hpp"

namespace nnbench {

struct BackendDescriptor {
  std::string name;
  std::vector<LayerKind> kinds;  ///< supported kinds, kAllKinds order
  bool supports_fusion = false;
  bool supports_sparse = false;
  bool thread_safe = false;
  std::optional<double> area_mm2;  ///< self-reported, for silicon efficiency
  std::optional<double> power_w;   ///< constant power model, if any

  bool supports(LayerKind k) const;
};

nlohmann::json to_json(const BackendDescriptor& d);
BackendDescriptor backend_descriptor_from_json(const nlohmann::json& j);

/// A compute backend. forward() must honour the shape rules; the numbers it
/// produces are judged downstream against the reference golden output.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual const BackendDescriptor& descriptor() const = 0;

  /// Throws CapabilityError for unsupported kinds.
  virtual LayerOutput forward(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                              const PoolSwitches* switches) = 0;

  /// Executes a consecutive chain as one call. The default composes forward()
  /// calls and is used by backends that declare fusion without a fused kernel.
  virtual Tensor forward_fused(std::span<const LayerSpec> specs, std::span<const LayerParams> params,
                               const Tensor& input);
};

/// Throws on an empty chain, mismatched param count, or shape-incompatible
/// neighbours; also rejects max-unpool (switches do not cross a fused call).
void check_fusion_chain(std::span<const LayerSpec> specs, std::size_t param_count);

/// All 12 kinds, fusion, sparse; forwards to the reference kernels.
std::unique_ptr<Backend> make_reference_backend();
/// Straightforward fp32 loops, every call computed three times; no LSTM,
/// no fusion. Exists to exercise comparison paths.
std::unique_ptr<Backend> make_naive_backend();
/// Loads a shared object exporting nnb_get_backend (see backend_abi.h).
std::unique_ptr<Backend> load_plugin_backend(const std::filesystem::path& path, const std::string& options = {});
/// Spawns `worker` (the nnbench_worker executable) hosting backend `inner`
/// and talks to it over pipes.
std::unique_ptr<Backend> make_worker_backend(const std::filesystem::path& worker, const std::string& inner);

/// Resolves a backend name:
///   reference | naive | plugin:<path.so> | worker:<inner name>
/// Unknown names throw SpecError (usage); load failures throw BackendError.
std::unique_ptr<Backend> open_backend(std::string_view name);

/// Path of the worker executable: $NNBENCH_WORKER, else next to the running
/// program.
std::filesystem::path default_worker_path();

}  // namespace nnbench
