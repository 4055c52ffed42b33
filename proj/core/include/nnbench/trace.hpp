#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnbench/kernels.hpp"

namespace nnbench {

enum class Region : std::uint8_t { input, output, weight };
std::string_view to_string(Region r) noexcept;

/// Static sites of data-dependent branches. Loop-bound branches are not traced.
enum class BranchSite : std::uint8_t {
  ReluSign = 1,
  PoolMaxCompare = 2,
  UnpoolMaxPlace = 3,
  ConvZeroWeight = 4,
  FcZeroWeight = 5,
};
inline constexpr std::size_t kBranchSites = 8;

/// Tensor table of a traced layer. Id 0 is the input, 1 the output, then the
/// parameter tensors in param_layout order, then scratch state (LSTM cell).
struct TraceTensor {
  std::string name;
  Region region = Region::input;
  std::uint64_t size = 0;
  friend bool operator==(const TraceTensor&, const TraceTensor&) = default;
};

std::vector<TraceTensor> trace_tensors(const LayerSpec& spec);

/// Streaming consumer of trace events in program order.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void begin(std::span<const TraceTensor> tensors) { (void)tensors; }
  virtual void access(std::uint32_t tensor, std::uint64_t index, bool write) = 0;
  virtual void branch(BranchSite site, bool taken) = 0;
  virtual void ops(std::uint64_t n) = 0;
  virtual void end() {}
};

struct TraceEvent {
  enum class Type : std::uint8_t { read, write, branch };
  Type type = Type::read;
  BranchSite site = BranchSite::ReluSign;
  bool taken = false;
  std::uint32_t tensor = 0;
  std::uint64_t index = 0;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct Trace {
  std::vector<TraceTensor> tensors;
  std::vector<TraceEvent> events;
  std::uint64_t op_count = 0;

  std::uint64_t reads() const;
  std::uint64_t writes() const;
  std::uint64_t branches() const;
  std::uint64_t mem_acc() const { return reads() + writes(); }
  friend bool operator==(const Trace&, const Trace&) = default;
};

class RecordingSink final : public TraceSink {
 public:
  void begin(std::span<const TraceTensor> tensors) override;
  void access(std::uint32_t tensor, std::uint64_t index, bool write) override;
  void branch(BranchSite site, bool taken) override;
  void ops(std::uint64_t n) override;
  Trace take() { return std::move(trace_); }

 private:
  Trace trace_;
};

/// Forwards every event to several sinks.
class TeeSink final : public TraceSink {
 public:
  explicit TeeSink(std::vector<TraceSink*> sinks) : sinks_(std::move(sinks)) {}
  void begin(std::span<const TraceTensor> tensors) override;
  void access(std::uint32_t tensor, std::uint64_t index, bool write) override;
  void branch(BranchSite site, bool taken) override;
  void ops(std::uint64_t n) override;
  void end() override;

 private:
  std::vector<TraceSink*> sinks_;
};

/// Per-site 2-bit saturating counters, initialized weakly taken (state 2).
class BranchPredictor {
 public:
  /// Returns true when the prediction was wrong.
  bool observe(BranchSite site, bool taken);
  std::uint64_t branches() const noexcept { return branches_; }
  std::uint64_t mispredictions() const noexcept { return mispredictions_; }

 private:
  std::array<std::uint8_t, kBranchSites> state_{2, 2, 2, 2, 2, 2, 2, 2};
  std::uint64_t branches_ = 0;
  std::uint64_t mispredictions_ = 0;
};

struct PredictorResult {
  double pr = 0.0;   ///< branches / (branches + ops + accesses)
  double mpr = 0.0;  ///< mispredicted / branches; 0 without branches
  std::uint64_t branches = 0;
  std::uint64_t mispredictions = 0;
  std::uint64_t instructions = 0;
};

PredictorResult simulate_predictor(const Trace& trace);
/// Same model over a bare branch stream (single site), used for unit checks.
PredictorResult simulate_predictor(std::span<const bool> outcomes);

/// Counts, footprints and predictor statistics without storing events.
class CountingSink final : public TraceSink {
 public:
  void begin(std::span<const TraceTensor> tensors) override;
  void access(std::uint32_t tensor, std::uint64_t index, bool write) override;
  void branch(BranchSite site, bool taken) override;
  void ops(std::uint64_t n) override { ops_ += n; }

  std::uint64_t reads() const noexcept { return reads_; }
  std::uint64_t writes() const noexcept { return writes_; }
  std::uint64_t ops_count() const noexcept { return ops_; }
  std::uint64_t branches() const noexcept { return predictor_.branches(); }
  std::uint64_t mispredictions() const noexcept { return predictor_.mispredictions(); }
  /// Distinct elements touched per region.
  std::uint64_t footprint(Region r) const;
  PredictorResult predictor() const;

 private:
  std::vector<TraceTensor> tensors_;
  std::vector<std::vector<bool>> touched_;
  std::array<std::uint64_t, 3> footprint_{};
  std::uint64_t reads_ = 0, writes_ = 0, ops_ = 0;
  BranchPredictor predictor_;
};

/// Binary trace dump (docs/trace-format.md).
class DumpSink final : public TraceSink {
 public:
  explicit DumpSink(const std::filesystem::path& path);
  ~DumpSink() override;
  void begin(std::span<const TraceTensor> tensors) override;
  void access(std::uint32_t tensor, std::uint64_t index, bool write) override;
  void branch(BranchSite site, bool taken) override;
  void ops(std::uint64_t n) override;
  void end() override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};
Trace read_trace_dump(const std::filesystem::path& path);

inline constexpr double kDefaultOpsBudget = 1e8;

/// Runs the layer with instrumentation, streaming events into `sink`. Throws
/// BudgetError when max(ops, mem_acc) of the analytic model exceeds `budget`.
/// The returned output is bit-identical to forward_layer.
LayerOutput trace_layer(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                        TraceSink& sink, double budget = kDefaultOpsBudget,
                        const PoolSwitches* switches = nullptr);

struct RecordedTrace {
  Trace trace;
  LayerOutput output;
};
RecordedTrace record_trace(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                           double budget = kDefaultOpsBudget, const PoolSwitches* switches = nullptr);

}  // namespace nnbench
