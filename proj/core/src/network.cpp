#include "nnbench/network.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nnbench/error.hpp"

namespace nnbench {

using nlohmann::json;

std::string_view to_string(EdgeKind k) noexcept {
  switch (k) {
    case EdgeKind::skip: return "skip";
    case EdgeKind::input: return "input";
    case EdgeKind::switches: return "switches";
    case EdgeKind::external: return "external";
  }
  return "?";
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::dense: return "dense";
    case Variant::sparse: return "sparse";
    case Variant::fx16: return "fx16";
  }
  return "?";
}

std::int64_t input_source(const NetworkDescriptor& net, std::size_t i) {
  for (const auto& e : net.edges) {
    if (e.to != static_cast<std::int64_t>(i)) continue;
    if (e.kind == EdgeKind::input) return e.from;
    if (e.kind == EdgeKind::external) return -2;
  }
  return static_cast<std::int64_t>(i) - 1;
}

namespace {

std::string layer_label(const NetworkDescriptor& net, std::int64_t i) {
  if (i < 0) return "network input";
  const auto& l = net.layers[static_cast<std::size_t>(i)];
  return "layers[" + std::to_string(i) + "] (" + (l.name.empty() ? std::string(to_string(l.kind)) : l.name) + ")";
}

}  // namespace

void validate_network(const NetworkDescriptor& net) {
  if (net.name.empty()) throw SpecError("name", "must not be empty");
  if (net.layers.empty()) throw SpecError("layers", "network has no layers");

  std::vector<TensorShape> outs;
  outs.reserve(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const std::string path = "layers[" + std::to_string(i) + "]";
    validate(net.layers[i], path);
    outs.push_back(output_shape(net.layers[i]));
  }

  const auto n = static_cast<std::int64_t>(net.layers.size());
  std::vector<int> redirected(net.layers.size(), 0);
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const auto& e = net.edges[k];
    const std::string path = "edges[" + std::to_string(k) + "]";
    if (e.to < 0 || e.to >= n) throw SpecError(path + ".to", "layer index out of range");
    if (e.from < -1 || e.from >= e.to) {
      throw SpecError(path + ".from", "must be -1 or an earlier layer index");
    }
    const auto& target = net.layers[static_cast<std::size_t>(e.to)];
    switch (e.kind) {
      case EdgeKind::input:
      case EdgeKind::external:
        if (++redirected[static_cast<std::size_t>(e.to)] > 1) {
          throw SpecError(path, "layer has more than one input/external edge");
        }
        if (e.kind == EdgeKind::external && e.from != -1) {
          throw SpecError(path + ".from", "external edges use from = -1");
        }
        break;
      case EdgeKind::skip: {
        const std::uint64_t have =
            e.from < 0 ? net.input_shape().element_count() : outs[static_cast<std::size_t>(e.from)].element_count();
        if (have != target.input_shape.element_count()) {
          throw SpecError(path, "skip edge from " + layer_label(net, e.from) + " to " +
                                    layer_label(net, e.to) + " is not shape-compatible");
        }
        break;
      }
      case EdgeKind::switches: {
        if (e.from < 0 || net.layers[static_cast<std::size_t>(e.from)].kind != LayerKind::PoolMax ||
            target.kind != LayerKind::UnpoolMax) {
          throw SpecError(path, "switch edges connect a max-pool layer to a max-unpool layer");
        }
        const auto& pool = net.layers[static_cast<std::size_t>(e.from)];
        if (pool.input_shape != outs[static_cast<std::size_t>(e.to)] ||
            outs[static_cast<std::size_t>(e.from)] != target.input_shape) {
          throw SpecError(path, "unpool " + layer_label(net, e.to) + " does not invert " +
                                    layer_label(net, e.from));
        }
        break;
      }
    }
  }
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].kind == LayerKind::UnpoolMax) {
      bool has = false;
      for (const auto& e : net.edges) has |= e.kind == EdgeKind::switches && e.to == static_cast<std::int64_t>(i);
      if (!has) throw SpecError("layers[" + std::to_string(i) + "]", "max-unpool layer has no switch edge");
    }
  }

  for (std::size_t i = 1; i < net.layers.size(); ++i) {
    const std::int64_t src = input_source(net, i);
    if (src == -2 || src == -1) {
      if (src == -1 && net.input_shape().element_count() != net.layers[i].input_shape.element_count()) {
        throw SpecError("layers[" + std::to_string(i) + "].input_shape",
                        layer_label(net, -1) + " is incompatible with " + layer_label(net, static_cast<std::int64_t>(i)));
      }
      continue;
    }
    if (outs[static_cast<std::size_t>(src)].element_count() != net.layers[i].input_shape.element_count()) {
      throw SpecError("layers[" + std::to_string(i) + "].input_shape",
                      "output " + outs[static_cast<std::size_t>(src)].to_string() + " of " + layer_label(net, src) +
                          " is incompatible with input " + net.layers[i].input_shape.to_string() + " of " +
                          layer_label(net, static_cast<std::int64_t>(i)));
    }
  }
}

// ---- JSON -----------------------------------------------------------------

namespace {

json pair(std::uint64_t a, std::uint64_t b) { return json::array({a, b}); }

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SpecError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SpecError(path + "." + key, "missing required field");
  return *it;
}

std::uint64_t as_count(const json& j, const std::string& path, bool allow_zero = true) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw SpecError(path, "expected an integer");
  if (j.is_number_integer() && j.get<std::int64_t>() < 0) throw SpecError(path, "must be non-negative");
  const auto v = j.get<std::uint64_t>();
  if (!allow_zero && v == 0) throw SpecError(path, "must be >= 1");
  return v;
}

double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) throw SpecError(path, "expected a number");
  return j.get<double>();
}

std::pair<std::uint64_t, std::uint64_t> as_pair(const json& h, const char* key,
                                                const std::string& path, std::uint64_t dflt) {
  auto it = h.find(key);
  const std::string p = path + "." + key;
  if (it == h.end()) return {dflt, dflt};
  if (it->is_array()) {
    if (it->size() != 2) throw SpecError(p, "expected [h, w]");
    return {as_count((*it)[0], p + "[0]"), as_count((*it)[1], p + "[1]")};
  }
  const auto v = as_count(*it, p);
  return {v, v};
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok |= it.key() == a;
    if (!ok) throw SpecError(path + "." + it.key(), "unknown field");
  }
}

}  // namespace

json to_json(const LayerSpec& spec) {
  json h = json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConvParams>) {
          h["out_channels"] = p.out_channels;
          h["kernel"] = pair(p.kernel_h, p.kernel_w);
          h["stride"] = pair(p.stride_h, p.stride_w);
          h["pad"] = pair(p.pad_h, p.pad_w);
        } else if constexpr (std::is_same_v<T, PoolParams>) {
          h["kernel"] = pair(p.kernel_h, p.kernel_w);
          h["stride"] = pair(p.stride_h, p.stride_w);
          h["pad"] = pair(p.pad_h, p.pad_w);
        } else if constexpr (std::is_same_v<T, FCParams>) {
          h["out_features"] = p.out_features;
        } else if constexpr (std::is_same_v<T, LRNParams>) {
          h["local_size"] = p.local_size;
          h["alpha"] = p.alpha;
          h["beta"] = p.beta;
          h["k"] = p.k;
        } else if constexpr (std::is_same_v<T, BNParams>) {
          h["epsilon"] = p.epsilon;
        } else if constexpr (std::is_same_v<T, LSTMParams>) {
          h["hidden"] = p.hidden;
          h["timesteps"] = p.timesteps;
          h["bidirectional"] = p.bidirectional;
        }
      },
      spec.hyper);
  json j;
  if (!spec.name.empty()) j["name"] = spec.name;
  j["kind"] = to_string(spec.kind);
  j["input_shape"] = std::vector<std::uint64_t>(spec.input_shape.dims().begin(), spec.input_shape.dims().end());
  j["hyperparams"] = std::move(h);
  j["sparsity"] = spec.sparsity;
  j["precision"] = to_string(spec.precision);
  return j;
}

LayerSpec layer_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SpecError(path, "expected an object");
  reject_unknown(j, {"name", "kind", "input_shape", "hyperparams", "sparsity", "precision"}, path);
  LayerSpec s;
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) throw SpecError(path + ".name", "expected a string");
    s.name = it->get<std::string>();
  }
  const auto& kind = member(j, "kind", path);
  if (!kind.is_string()) throw SpecError(path + ".kind", "expected a string");
  const auto k = parse_kind(kind.get<std::string>());
  if (!k) throw SpecError(path + ".kind", "unknown layer kind '" + kind.get<std::string>() + "'");
  s.kind = *k;

  const auto& shape = member(j, "input_shape", path);
  if (!shape.is_array() || shape.empty()) throw SpecError(path + ".input_shape", "expected a non-empty array");
  std::vector<std::uint64_t> dims;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dims.push_back(as_count(shape[i], path + ".input_shape[" + std::to_string(i) + "]", false));
  }
  try {
    s.input_shape = TensorShape(std::move(dims));
  } catch (const ShapeError& e) {
    throw SpecError(path + ".input_shape", e.what());
  }

  const std::string hp = path + ".hyperparams";
  json h = json::object();
  if (auto it = j.find("hyperparams"); it != j.end()) {
    if (!it->is_object()) throw SpecError(hp, "expected an object");
    h = *it;
  }
  s.hyper = default_hyperparams(s.kind);
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConvParams>) {
          reject_unknown(h, {"out_channels", "kernel", "stride", "pad"}, hp);
          p.out_channels = as_count(member(h, "out_channels", hp), hp + ".out_channels");
          if (p.out_channels == 0) throw SpecError(hp + ".out_channels", "must be >= 1");
          std::tie(p.kernel_h, p.kernel_w) = as_pair(h, "kernel", hp, 1);
          std::tie(p.stride_h, p.stride_w) = as_pair(h, "stride", hp, 1);
          std::tie(p.pad_h, p.pad_w) = as_pair(h, "pad", hp, 0);
        } else if constexpr (std::is_same_v<T, PoolParams>) {
          reject_unknown(h, {"kernel", "stride", "pad"}, hp);
          std::tie(p.kernel_h, p.kernel_w) = as_pair(h, "kernel", hp, 2);
          std::tie(p.stride_h, p.stride_w) = as_pair(h, "stride", hp, p.kernel_h);
          if (h.find("stride") == h.end()) p.stride_w = p.kernel_w;
          std::tie(p.pad_h, p.pad_w) = as_pair(h, "pad", hp, 0);
        } else if constexpr (std::is_same_v<T, FCParams>) {
          reject_unknown(h, {"out_features"}, hp);
          p.out_features = as_count(member(h, "out_features", hp), hp + ".out_features");
          if (p.out_features == 0) throw SpecError(hp + ".out_features", "must be >= 1");
        } else if constexpr (std::is_same_v<T, LRNParams>) {
          reject_unknown(h, {"local_size", "alpha", "beta", "k"}, hp);
          if (h.contains("local_size")) p.local_size = as_count(h["local_size"], hp + ".local_size");
          if (h.contains("alpha")) p.alpha = as_real(h["alpha"], hp + ".alpha");
          if (h.contains("beta")) p.beta = as_real(h["beta"], hp + ".beta");
          if (h.contains("k")) p.k = as_real(h["k"], hp + ".k");
        } else if constexpr (std::is_same_v<T, BNParams>) {
          reject_unknown(h, {"epsilon"}, hp);
          if (h.contains("epsilon")) p.epsilon = as_real(h["epsilon"], hp + ".epsilon");
        } else if constexpr (std::is_same_v<T, LSTMParams>) {
          reject_unknown(h, {"hidden", "timesteps", "bidirectional"}, hp);
          p.hidden = as_count(member(h, "hidden", hp), hp + ".hidden");
          p.timesteps = h.contains("timesteps") ? as_count(h["timesteps"], hp + ".timesteps")
                                                : s.input_shape[0];
          if (h.contains("bidirectional")) {
            if (!h["bidirectional"].is_boolean()) throw SpecError(hp + ".bidirectional", "expected a boolean");
            p.bidirectional = h["bidirectional"].get<bool>();
          }
        } else {
          reject_unknown(h, {}, hp);
        }
      },
      s.hyper);

  if (auto it = j.find("sparsity"); it != j.end()) s.sparsity = as_real(*it, path + ".sparsity");
  if (auto it = j.find("precision"); it != j.end()) {
    if (!it->is_string()) throw SpecError(path + ".precision", "expected a string");
    const auto p = parse_precision(it->get<std::string>());
    if (!p) throw SpecError(path + ".precision", "unknown precision '" + it->get<std::string>() + "'");
    s.precision = *p;
  }
  validate(s, path);
  return s;
}

json to_json(const NetworkDescriptor& net) {
  json j;
  j["netspec_version"] = kNetspecVersion;
  j["name"] = net.name;
  j["variant"] = to_string(net.variant);
  j["executable"] = net.executable;
  json layers = json::array();
  for (const auto& l : net.layers) layers.push_back(to_json(l));
  j["layers"] = std::move(layers);
  json edges = json::array();
  for (const auto& e : net.edges) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
  }
  j["edges"] = std::move(edges);
  return j;
}

NetworkDescriptor network_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("", "netspec must be a JSON object");
  reject_unknown(j, {"netspec_version", "name", "variant", "executable", "layers", "edges"}, "");
  const auto& ver = member(j, "netspec_version", "");
  if (!ver.is_number_integer() || ver.get<int>() != kNetspecVersion) {
    throw SpecError("netspec_version", "unsupported version (expected 1)");
  }
  NetworkDescriptor net;
  const auto& name = member(j, "name", "");
  if (!name.is_string()) throw SpecError("name", "expected a string");
  net.name = name.get<std::string>();
  if (auto it = j.find("variant"); it != j.end()) {
    const std::string v = it->is_string() ? it->get<std::string>() : std::string();
    if (v == "dense") net.variant = Variant::dense;
    else if (v == "sparse") net.variant = Variant::sparse;
    else if (v == "fx16") net.variant = Variant::fx16;
    else throw SpecError("variant", "expected one of dense, sparse, fx16");
  }
  if (auto it = j.find("executable"); it != j.end()) {
    if (!it->is_boolean()) throw SpecError("executable", "expected a boolean");
    net.executable = it->get<bool>();
  }
  const auto& layers = member(j, "layers", "");
  if (!layers.is_array()) throw SpecError("layers", "expected an array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    net.layers.push_back(layer_from_json(layers[i], "layers[" + std::to_string(i) + "]"));
  }
  if (auto it = j.find("edges"); it != j.end()) {
    if (!it->is_array()) throw SpecError("edges", "expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const auto& e = (*it)[k];
      const std::string p = "edges[" + std::to_string(k) + "]";
      Edge edge;
      if (e.is_array()) {  // bare [from, to] pairs are skip connections
        if (e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
          throw SpecError(p, "expected [from, to]");
        }
        edge.from = e[0].get<std::int64_t>();
        edge.to = e[1].get<std::int64_t>();
      } else {
        reject_unknown(e, {"from", "to", "kind"}, p);
        const auto& from = member(e, "from", p);
        const auto& to = member(e, "to", p);
        if (!from.is_number_integer()) throw SpecError(p + ".from", "expected an integer");
        if (!to.is_number_integer()) throw SpecError(p + ".to", "expected an integer");
        edge.from = from.get<std::int64_t>();
        edge.to = to.get<std::int64_t>();
        const std::string kind = e.value("kind", std::string("skip"));
        if (kind == "skip") edge.kind = EdgeKind::skip;
        else if (kind == "input") edge.kind = EdgeKind::input;
        else if (kind == "switches") edge.kind = EdgeKind::switches;
        else if (kind == "external") edge.kind = EdgeKind::external;
        else throw SpecError(p + ".kind", "unknown edge kind '" + kind + "'");
      }
      net.edges.push_back(edge);
    }
  }
  validate_network(net);
  return net;
}

std::string netspec_text(const NetworkDescriptor& net) { return to_json(net).dump(2) + "\n"; }

NetworkDescriptor load_netspec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open netspec " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError("", path.string() + ": " + e.what());
  }
  return network_from_json(j);
}

void save_netspec(const NetworkDescriptor& net, const std::filesystem::path& path) {
  validate_network(net);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << netspec_text(net);
}

}  // namespace nnbench
