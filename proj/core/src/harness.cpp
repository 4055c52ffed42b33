#include "nnbench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "nnbench/analytic.hpp"
#include "nnbench/error.hpp"

namespace nnbench {

std::uint64_t Benchmark::ops() const {
  std::uint64_t total = 0;
  if (layer) return analytic_counts(*layer).ops;
  for (const auto& l : network->layers) total += analytic_counts(l).ops;
  return total;
}

double Benchmark::giga_ops() const { return static_cast<double>(ops()) / 1e9; }

std::uint64_t Benchmark::resident_elements() const {
  auto one = [](const LayerSpec& l) {
    std::uint64_t params = 0;
    for (const auto& p : param_layout(l)) params += p.shape.element_count();
    return l.input_shape.element_count() + output_shape(l).element_count() + params;
  };
  if (layer) return one(*layer);
  std::uint64_t m = 0;
  for (const auto& l : network->layers) m = std::max(m, one(l));
  return m;
}

std::optional<Suite> parse_suite(std::string_view s) {
  if (s == "micro") return Suite::micro;
  if (s == "macro") return Suite::macro;
  if (s == "all") return Suite::all;
  return std::nullopt;
}

std::string_view to_string(Suite s) noexcept {
  switch (s) {
    case Suite::micro: return "micro";
    case Suite::macro: return "macro";
    case Suite::all: return "all";
  }
  return "all";
}

std::string_view to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::skipped: return "skipped";
    case RunStatus::failed: return "failed";
  }
  return "failed";
}

namespace {

bool matches(const std::string& id, const std::vector<std::string>& filters) {
  if (filters.empty()) return true;
  for (const auto& f : filters) {
    if (id == f) return true;
    if (id.size() > f.size() && id.compare(0, f.size(), f) == 0 && id[f.size()] == '/') return true;
  }
  return false;
}

}  // namespace

std::vector<Benchmark> select_benchmarks(Suite suite, const std::vector<std::string>& filters) {
  std::vector<Benchmark> out;
  if (suite != Suite::macro) {
    for (auto k : kAllKinds) {
      for (const auto& m : config_table(k)) {
        Benchmark b{micro_id(k, m.cls.label), m.spec, std::nullopt};
        if (matches(b.id, filters)) out.push_back(std::move(b));
      }
    }
  }
  if (suite != Suite::micro) {
    for (auto& n : all_networks()) {
      Benchmark b{"net/" + n.name, std::nullopt, n};
      if (matches(b.id, filters)) out.push_back(std::move(b));
    }
  }
  return out;
}

Tensor execute(Backend& backend, const Benchmark& bench, std::uint64_t seed) {
  if (bench.layer) {
    const LayerSpec& spec = *bench.layer;
    const LayerParams params = instantiate_layer_params(spec, seed, 0);
    const Tensor input = benchmark_input(spec.input_shape, seed);
    std::optional<PoolSwitches> sw;
    if (spec.kind == LayerKind::UnpoolMax) sw = synthetic_switches(spec, seed);
    return backend.forward(spec, params, input, sw ? &*sw : nullptr).output;
  }
  const NetworkDescriptor& net = *bench.network;
  const ModelParams params = instantiate_params(net, seed);
  RunNetworkOptions opt;
  opt.executor = [&backend](std::size_t, const LayerSpec& s, const LayerParams& p, const Tensor& x,
                            const PoolSwitches* sw) { return backend.forward(s, p, x, sw); };
  return run_network(net, params, benchmark_input(net.input_shape(), seed), opt).output;
}

std::optional<std::filesystem::path> GoldenCache::file_for(const Benchmark& b, std::uint64_t seed) const {
  if (!dir_) return std::nullopt;
  std::string name = b.id;
  std::replace(name.begin(), name.end(), '/', '_');
  return *dir_ / (name + "-s" + std::to_string(seed) + ".nbgd");
}

const Tensor& GoldenCache::get(const Benchmark& b, std::uint64_t seed) {
  const std::string key = b.id + "#" + std::to_string(seed);
  if (auto it = mem_.find(key); it != mem_.end()) return it->second;
  Tensor golden;
  const auto file = file_for(b, seed);
  if (file && std::filesystem::exists(*file)) {
    golden = read_golden(*file);
  } else {
    auto ref = make_reference_backend();
    golden = execute(*ref, b, seed);
    if (file) {
      std::filesystem::create_directories(file->parent_path());
      write_golden(*file, golden);
    }
  }
  return mem_.emplace(key, std::move(golden)).first->second;
}

bool GoldenCache::contains(const Benchmark& b, std::uint64_t seed) const {
  if (mem_.count(b.id + "#" + std::to_string(seed))) return true;
  const auto file = file_for(b, seed);
  return file && std::filesystem::exists(*file);
}

void GoldenCache::put(const Benchmark& b, std::uint64_t seed, Tensor golden) {
  if (const auto file = file_for(b, seed)) {
    std::filesystem::create_directories(file->parent_path());
    write_golden(*file, golden);
  }
  mem_[b.id + "#" + std::to_string(seed)] = std::move(golden);
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double accuracy(const Tensor& out, const Tensor& golden, double tol) {
  if (out.size() != golden.size() || out.size() == 0) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (std::fabs(static_cast<double>(out[i]) - static_cast<double>(golden[i])) <= tol) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(out.size());
}

namespace {

std::string kinds_gap(const Backend& backend, const Benchmark& b) {
  const auto& d = backend.descriptor();
  auto check = [&](const LayerSpec& l) -> std::string {
    if (!d.supports(l.kind)) return "unsupported kind " + std::string(to_string(l.kind));
    if (l.is_sparse() && !d.supports_sparse) return "sparse weights not supported";
    return {};
  };
  if (b.layer) return check(*b.layer);
  for (const auto& l : b.network->layers) {
    if (auto gap = check(l); !gap.empty()) return gap;
  }
  return {};
}

}  // namespace

RunResult run_benchmark(Backend& backend, const Benchmark& bench, const RunOptions& options) {
  if (options.repetitions < 1) throw SpecError("repetitions", "must be >= 1");
  if (options.warmup >= options.repetitions) {
    throw SpecError("warmup", "must be smaller than repetitions (" + std::to_string(options.repetitions) + ")");
  }
  RunResult r;
  r.benchmark = bench.id;
  r.backend = backend.descriptor().name;
  r.repetitions = options.repetitions;
  r.warmup = options.warmup;
  r.giga_ops = bench.giga_ops();

  auto skip = [&](std::string why) {
    r.status = RunStatus::skipped;
    r.note = std::move(why);
    return r;
  };
  if (bench.network && !bench.network->executable) return skip("analytic-only descriptor");
  if (bench.layer) {
    const auto c = analytic_counts(*bench.layer);
    if (static_cast<double>(c.ops) > options.max_ops || bench.resident_elements() > options.max_elements) {
      return skip("over execution budget (analytic-only)");
    }
  }
  if (auto gap = kinds_gap(backend, bench); !gap.empty()) return skip(gap);

  GoldenCache local;
  GoldenCache& cache = options.golden ? *options.golden : local;
  const std::optional<double> power = options.power_w ? options.power_w : backend.descriptor().power_w;
  double probe_energy = 0.0;

  try {
    // Parameters and inputs are built once, outside the timed region.
    std::optional<LayerParams> lp;
    std::optional<ModelParams> mp;
    Tensor input;
    std::optional<PoolSwitches> sw;
    if (bench.layer) {
      lp = instantiate_layer_params(*bench.layer, options.seed, 0);
      input = benchmark_input(bench.layer->input_shape, options.seed);
      if (bench.layer->kind == LayerKind::UnpoolMax) sw = synthetic_switches(*bench.layer, options.seed);
    } else {
      mp = instantiate_params(*bench.network, options.seed);
      input = benchmark_input(bench.network->input_shape(), options.seed);
    }
    RunNetworkOptions net_opt;
    net_opt.executor = [&backend](std::size_t, const LayerSpec& s, const LayerParams& p, const Tensor& x,
                                  const PoolSwitches* w) { return backend.forward(s, p, x, w); };
    auto once = [&]() -> Tensor {
      if (bench.layer) return backend.forward(*bench.layer, *lp, input, sw ? &*sw : nullptr).output;
      return run_network(*bench.network, *mp, input, net_opt).output;
    };

    for (std::uint64_t i = 0; i < options.repetitions; ++i) {
      const bool timed = i >= options.warmup;
      if (timed && options.probe) options.probe->start();
      const auto t0 = std::chrono::steady_clock::now();
      r.output = once();
      const auto t1 = std::chrono::steady_clock::now();
      if (timed) {
        if (options.probe) probe_energy += options.probe->stop();
        r.times.push_back(std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9));
      }
    }
  } catch (const CapabilityError& e) {
    return skip(e.what());
  } catch (const BudgetError& e) {
    return skip(e.what());
  } catch (const std::exception& e) {
    r.status = RunStatus::failed;
    r.note = e.what();
    return r;
  }

  r.wall_time = median(r.times);
  if (options.probe) {
    r.energy = probe_energy / static_cast<double>(r.times.size());
  } else if (power) {
    r.energy = *power * r.wall_time;
  }
  if (!r.output.all_finite()) {
    r.status = RunStatus::failed;
    r.note = "non-finite output";
    r.mse_vs_golden = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const Tensor& golden = cache.get(bench, options.seed);
  if (golden.shape != r.output.shape) {
    r.status = RunStatus::failed;
    r.note = "output shape " + r.output.shape.to_string() + " differs from golden " + golden.shape.to_string();
    return r;
  }
  r.mse_vs_golden = mse(r.output, golden);
  r.acc = accuracy(r.output, golden, options.acc_tolerance);
  if (r.mse_vs_golden > options.mse_tolerance) {
    r.status = RunStatus::failed;
    r.note = "mse above tolerance";
  }
  return r;
}

std::vector<RunResult> run_suite(Backend& backend, const std::vector<Benchmark>& benchmarks,
                                 const RunOptions& options) {
  std::vector<RunResult> out;
  out.reserve(benchmarks.size());
  for (const auto& b : benchmarks) out.push_back(run_benchmark(backend, b, options));
  return out;
}

nlohmann::json to_json(const RunResult& r, bool with_timing) {
  using nlohmann::json;
  const bool ran = r.status != RunStatus::skipped && !r.output.data.empty();
  json j = {{"benchmark", r.benchmark},
            {"backend", r.backend},
            {"status", to_string(r.status)},
            {"note", r.note},
            {"giga_ops", r.giga_ops},
            {"repetitions", r.repetitions},
            {"warmup", r.warmup},
            {"output_shape", ran ? json(r.output.shape.to_string()) : json(nullptr)},
            {"output_digest", ran ? json(tensor_digest(r.output)) : json(nullptr)},
            {"mse_vs_golden", ran && std::isfinite(r.mse_vs_golden) ? json(r.mse_vs_golden) : json(nullptr)},
            {"acc", ran ? json(r.acc) : json(nullptr)}};
  if (with_timing) {
    j["wall_time"] = r.status == RunStatus::skipped ? json(nullptr) : json(r.wall_time);
    j["times"] = r.times;
    j["energy"] = r.energy ? json(*r.energy) : json(nullptr);
  }
  return j;
}

}  // namespace nnbench
