#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nnbench/backend.hpp"
#include "nnbench/registry.hpp"

namespace nnbench {

/// A runnable unit: one micro configuration or one macro network.
struct Benchmark {
  std::string id;  ///< "conv/A", "net/lenet5"
  std::optional<LayerSpec> layer;
  std::optional<NetworkDescriptor> network;

  bool is_micro() const { return layer.has_value(); }
  /// Analytic operation count in units of 1e9 (sparse-aware).
  double giga_ops() const;
  /// Elements held at once: inputs, outputs and parameters.
  std::uint64_t resident_elements() const;
  std::uint64_t ops() const;
};

enum class Suite { micro, macro, all };
std::optional<Suite> parse_suite(std::string_view s);
std::string_view to_string(Suite s) noexcept;

/// Registry selection in deterministic order: micro configs (kind order, A-G)
/// then networks. A filter selects an exact id or an id prefix up to a '/'
/// ("conv", "net/lenet5"). No filters selects everything.
std::vector<Benchmark> select_benchmarks(Suite suite, const std::vector<std::string>& filters = {});

/// Energy measurement hook around the timed runs.
class EnergyProbe {
 public:
  virtual ~EnergyProbe() = default;
  virtual void start() = 0;
  virtual double stop() = 0;  ///< Joules since start()
};

/// Stored reference outputs keyed by benchmark id and seed. With a directory
/// the goldens are also persisted as .nbgd files and reused across runs.
class GoldenCache {
 public:
  explicit GoldenCache(std::optional<std::filesystem::path> dir = std::nullopt) : dir_(std::move(dir)) {}
  const Tensor& get(const Benchmark& b, std::uint64_t seed);
  bool contains(const Benchmark& b, std::uint64_t seed) const;
  /// Stores a golden computed elsewhere (parallel prefill); persisted like get().
  void put(const Benchmark& b, std::uint64_t seed, Tensor golden);
  std::optional<std::filesystem::path> file_for(const Benchmark& b, std::uint64_t seed) const;

 private:
  std::optional<std::filesystem::path> dir_;
  std::map<std::string, Tensor> mem_;
};

struct RunOptions {
  std::uint64_t repetitions = 3;  ///< total runs, warm-up included
  std::uint64_t warmup = 1;       ///< leading runs discarded from timing
  std::uint64_t seed = 42;
  // Execution budget for micro configurations; executable networks always run.
  double max_ops = 1e10;
  std::uint64_t max_elements = 200000000;
  std::optional<double> power_w;          ///< overrides the backend's power model
  EnergyProbe* probe = nullptr;
  GoldenCache* golden = nullptr;          ///< shared cache; a private one otherwise
  double mse_tolerance = 1e-6;            ///< failure above this
  double acc_tolerance = 1e-3;            ///< absolute per-element match for acc
};

enum class RunStatus { ok, skipped, failed };
std::string_view to_string(RunStatus s) noexcept;

struct RunResult {
  std::string benchmark;
  std::string backend;
  RunStatus status = RunStatus::ok;
  std::string note;
  Tensor output;
  double wall_time = 0.0;      ///< median of the timed runs, seconds
  std::vector<double> times;   ///< every timed run
  std::optional<double> energy;
  double mse_vs_golden = 0.0;
  double acc = 0.0;            ///< fraction of outputs within acc_tolerance of golden
  std::uint64_t repetitions = 0;
  std::uint64_t warmup = 0;
  double giga_ops = 0.0;
};

/// Median after the warm-up runs. Capability gaps give a skipped record,
/// NaN/Inf or an MSE above tolerance a failed one.
RunResult run_benchmark(Backend& backend, const Benchmark& bench, const RunOptions& options = {});
std::vector<RunResult> run_suite(Backend& backend, const std::vector<Benchmark>& benchmarks,
                                 const RunOptions& options = {});

/// Executes a benchmark once on a backend without timing (golden generation).
Tensor execute(Backend& backend, const Benchmark& bench, std::uint64_t seed);

double median(std::vector<double> v);
/// Fraction of elements with |a - b| <= tol.
double accuracy(const Tensor& out, const Tensor& golden, double tol);

/// Timing-free fields only (used for byte-stable artifacts).
nlohmann::json to_json(const RunResult& r, bool with_timing = true);

}  // namespace nnbench
