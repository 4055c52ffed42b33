#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nnbench/layer.hpp"

namespace nnbench {

/// Connectivity beyond the implicit chain (layer i feeds layer i+1).
///   skip      output of `from` is added elementwise to the input of `to`
///   input     `to` reads the output of `from` instead of its predecessor
///             (from = -1 selects the network input)
///   switches  max-unpool `to` places values using the argmax of max-pool `from`
///   external  `to` starts a detached segment fed by a synthetic tensor
///             (e.g. region features produced by a non-layer stage); from = -1
enum class EdgeKind : std::uint8_t { skip, input, switches, external };
std::string_view to_string(EdgeKind k) noexcept;

struct Edge {
  std::int64_t from = -1;
  std::int64_t to = 0;
  EdgeKind kind = EdgeKind::skip;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Variant : std::uint8_t { dense, sparse, fx16 };
std::string_view to_string(Variant v) noexcept;

inline constexpr int kNetspecVersion = 1;

struct NetworkDescriptor {
  std::string name;
  Variant variant = Variant::dense;
  bool executable = false;
  std::vector<LayerSpec> layers;
  std::vector<Edge> edges;

  const TensorShape& input_shape() const { return layers.at(0).input_shape; }
  friend bool operator==(const NetworkDescriptor&, const NetworkDescriptor&) = default;
};

/// Where layer `i` takes its input from: a layer index, -1 for the network
/// input, or -2 for an external (synthetic) source.
std::int64_t input_source(const NetworkDescriptor& net, std::size_t i);

/// Validates every layer and all connectivity. Adjacent layers compose when
/// element counts agree (an implicit reshape, as between conv and fc).
void validate_network(const NetworkDescriptor& net);

nlohmann::json to_json(const LayerSpec& spec);
LayerSpec layer_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json to_json(const NetworkDescriptor& net);
NetworkDescriptor network_from_json(const nlohmann::json& j);

NetworkDescriptor load_netspec(const std::filesystem::path& path);
void save_netspec(const NetworkDescriptor& net, const std::filesystem::path& path);
/// Canonical text form (2-space indent, trailing newline) used for shipped files.
std::string netspec_text(const NetworkDescriptor& net);

}  // namespace nnbench
