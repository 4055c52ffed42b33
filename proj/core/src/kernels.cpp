#include "nnbench/kernels.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "kernel_impl.hpp"
#include "nnbench/rng.hpp"

namespace nnbench {

using detail::NullProbe;

Tensor forward_conv(const Tensor& input, const LayerParams& params, const LayerSpec& spec) {
  if (spec.kind != LayerKind::Conv) throw Error("forward_conv: spec is not a conv layer");
  NullProbe p;
  return detail::conv_like(input, params, spec, p);
}

Tensor forward_deconv(const Tensor& input, const LayerParams& params, const LayerSpec& spec) {
  if (spec.kind != LayerKind::Deconv) throw Error("forward_deconv: spec is not a deconv layer");
  NullProbe p;
  return detail::conv_like(input, params, spec, p);
}

LayerOutput forward_pool(const Tensor& input, const LayerSpec& spec) {
  if (spec.kind != LayerKind::PoolAvg && spec.kind != LayerKind::PoolMax) {
    throw Error("forward_pool: spec is not a pooling layer");
  }
  NullProbe p;
  return detail::pool(input, spec, p);
}

Tensor forward_fc(const Tensor& input, const LayerParams& params, const LayerSpec& spec) {
  if (spec.kind != LayerKind::FC) throw Error("forward_fc: spec is not an fc layer");
  NullProbe p;
  return detail::fc(input, params, spec, p);
}

Tensor forward_activation(const Tensor& input, LayerKind kind) {
  NullProbe p;
  return detail::activation(input, kind, p);
}

Tensor forward_lrn(const Tensor& input, const LayerSpec& spec) {
  if (spec.kind != LayerKind::LRN) throw Error("forward_lrn: spec is not an lrn layer");
  NullProbe p;
  return detail::lrn(input, spec, p);
}

Tensor forward_bn(const Tensor& input, const LayerParams& params, const LayerSpec& spec) {
  if (spec.kind != LayerKind::BN) throw Error("forward_bn: spec is not a bn layer");
  NullProbe p;
  return detail::bn(input, params, spec, p);
}

Tensor forward_unpool(const Tensor& input, const LayerSpec& spec, const PoolSwitches* switches) {
  if (spec.kind != LayerKind::UnpoolAvg && spec.kind != LayerKind::UnpoolMax) {
    throw Error("forward_unpool: spec is not an unpooling layer");
  }
  NullProbe p;
  return detail::unpool(input, spec, switches, p);
}

Tensor forward_lstm(const Tensor& input, const LayerParams& params, const LayerSpec& spec) {
  if (spec.kind != LayerKind::LSTM) throw Error("forward_lstm: spec is not an lstm layer");
  NullProbe p;
  return detail::lstm(input, params, spec, p);
}

LayerOutput forward_layer(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                          const PoolSwitches* switches) {
  NullProbe p;
  return detail::dispatch(spec, params, input, switches, p);
}

PoolSwitches synthetic_switches(const LayerSpec& unpool_spec, std::uint64_t seed) {
  const TensorShape full = output_shape(unpool_spec);
  LayerSpec pool;
  pool.kind = LayerKind::PoolMax;
  pool.input_shape = full;
  pool.hyper = unpool_spec.pool();
  const Tensor src = random_tensor(full, stream_seed(seed, kInputStream, 1));
  return *forward_pool(src, pool).switches;
}

Tensor benchmark_input(const TensorShape& shape, std::uint64_t seed) {
  return random_tensor(shape, stream_seed(seed, kInputStream, 0));
}

NetworkRun run_network(const NetworkDescriptor& net, const ModelParams& params, const Tensor& input,
                       const RunNetworkOptions& options) {
  if (!net.executable) throw Error(net.name + ": descriptor is analytic-only");
  validate_network(net);
  if (params.layers.size() != net.layers.size()) {
    throw ShapeError(net.name + ": parameters cover " + std::to_string(params.layers.size()) +
                     " layers, network has " + std::to_string(net.layers.size()));
  }
  if (input.shape.element_count() != net.input_shape().element_count()) {
    throw ShapeError(net.name + ": input " + input.shape.to_string() + " does not match network input " +
                     net.input_shape().to_string());
  }

  // Outputs that later layers still need (edge sources).
  std::vector<bool> needed(net.layers.size(), false);
  std::map<std::int64_t, std::int64_t> switch_src;
  for (const auto& e : net.edges) {
    if (e.from >= 0) needed[static_cast<std::size_t>(e.from)] = true;
    if (e.kind == EdgeKind::switches) switch_src[e.to] = e.from;
  }

  const LayerExecutor& exec = options.executor;
  NetworkRun run;
  std::vector<Tensor> kept(net.layers.size());
  std::map<std::int64_t, PoolSwitches> switches;
  Tensor prev = input;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& spec = net.layers[i];
    const std::int64_t src = input_source(net, i);
    Tensor x;
    if (src == -2) {
      x = random_tensor(spec.input_shape, stream_seed(params.seed, i, 0xE000));
    } else if (src == -1) {
      x = input.reshaped(spec.input_shape);
    } else if (src == static_cast<std::int64_t>(i) - 1) {
      x = prev.reshaped(spec.input_shape);
    } else {
      x = kept[static_cast<std::size_t>(src)].reshaped(spec.input_shape);
    }
    for (const auto& e : net.edges) {
      if (e.kind != EdgeKind::skip || e.to != static_cast<std::int64_t>(i)) continue;
      const Tensor& s = e.from < 0 ? input : kept[static_cast<std::size_t>(e.from)];
      for (std::size_t k = 0; k < x.size(); ++k) x.data[k] = x.data[k] + s.data[k];
    }
    const PoolSwitches* sw = nullptr;
    if (auto it = switch_src.find(static_cast<std::int64_t>(i)); it != switch_src.end()) {
      sw = &switches.at(it->second);
    }
    LayerOutput out = exec ? exec(i, spec, params.layers[i], x, sw)
                           : forward_layer(spec, params.layers[i], x, sw);
    if (!out.output.all_finite()) {
      throw Error(net.name + ": layers[" + std::to_string(i) + "] produced a non-finite value");
    }
    if (out.switches && needed[i]) switches[static_cast<std::int64_t>(i)] = std::move(*out.switches);
    if (needed[i]) kept[i] = out.output;
    if (options.keep_layer_outputs) run.layer_outputs.push_back(out.output);
    prev = std::move(out.output);
  }
  run.output = std::move(prev);
  return run;
}

double mse(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) {
    throw ShapeError("mse: shapes " + a.shape.to_string() + " and " + b.shape.to_string() + " differ");
  }
  if (a.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

// ---- golden files ---------------------------------------------------------

namespace {

constexpr char kGoldenMagic[4] = {'N', 'B', 'G', 'D'};
constexpr std::uint16_t kGoldenVersion = 1;

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <class T>
T get_le(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw FormatError("golden file truncated");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in[pos + i]) << (8 * i));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_golden(const Tensor& t) {
  std::vector<std::uint8_t> out(kGoldenMagic, kGoldenMagic + 4);
  put_le<std::uint16_t>(out, kGoldenVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(t.shape.rank()));
  put_le<std::uint64_t>(out, t.shape.element_count());
  for (auto d : t.shape.dims()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  out.reserve(out.size() + 4 * t.size());
  for (float v : t.data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_golden(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kGoldenMagic, 4) != 0) {
    throw FormatError("not a golden file (bad magic)");
  }
  std::size_t pos = 4;
  const auto version = get_le<std::uint16_t>(bytes, pos);
  if (version != kGoldenVersion) throw FormatError("unsupported golden version " + std::to_string(version));
  const auto rank = get_le<std::uint16_t>(bytes, pos);
  const auto count = get_le<std::uint64_t>(bytes, pos);
  std::vector<std::uint64_t> dims;
  for (std::uint16_t i = 0; i < rank; ++i) dims.push_back(get_le<std::uint32_t>(bytes, pos));
  TensorShape shape(dims);
  if (shape.element_count() != count) throw FormatError("golden header count does not match dims");
  if (bytes.size() - pos != 4 * count) throw FormatError("golden payload size mismatch");
  std::vector<float> data(count);
  for (auto& v : data) v = std::bit_cast<float>(get_le<std::uint32_t>(bytes, pos));
  return Tensor(std::move(shape), std::move(data));
}

void write_golden(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_golden(t);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Tensor read_golden(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_golden(bytes);
}

std::uint64_t tensor_digest(const Tensor& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  for (auto d : t.shape.dims()) mix(d, 8);
  for (float v : t.data) mix(std::bit_cast<std::uint32_t>(v), 4);
  return h;
}

}  // namespace nnbench
