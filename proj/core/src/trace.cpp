#include "nnbench/trace.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "kernel_impl.hpp"
#include "nnbench/analytic.hpp"

namespace nnbench {

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::input: return "input";
    case Region::output: return "output";
    case Region::weight: return "weight";
  }
  return "?";
}

std::vector<TraceTensor> trace_tensors(const LayerSpec& spec) {
  std::vector<TraceTensor> t;
  t.push_back({"input", Region::input, spec.input_shape.element_count()});
  const TensorShape out = output_shape(spec);
  t.push_back({"output", Region::output, out.element_count()});
  for (const auto& p : param_layout(spec)) t.push_back({p.name, Region::weight, p.shape.element_count()});
  if (spec.kind == LayerKind::LSTM) {
    const auto& l = spec.lstm();
    t.push_back({"cell", Region::output, spec.input_shape[1] * (l.bidirectional ? 2 : 1) * l.hidden});
  }
  return t;
}

std::uint64_t Trace::reads() const {
  return static_cast<std::uint64_t>(std::count_if(events.begin(), events.end(), [](const TraceEvent& e) {
    return e.type == TraceEvent::Type::read;
  }));
}

std::uint64_t Trace::writes() const {
  return static_cast<std::uint64_t>(std::count_if(events.begin(), events.end(), [](const TraceEvent& e) {
    return e.type == TraceEvent::Type::write;
  }));
}

std::uint64_t Trace::branches() const {
  return static_cast<std::uint64_t>(std::count_if(events.begin(), events.end(), [](const TraceEvent& e) {
    return e.type == TraceEvent::Type::branch;
  }));
}

// ---- sinks ----------------------------------------------------------------

void RecordingSink::begin(std::span<const TraceTensor> tensors) {
  trace_ = Trace{};
  trace_.tensors.assign(tensors.begin(), tensors.end());
}

void RecordingSink::access(std::uint32_t tensor, std::uint64_t index, bool write) {
  TraceEvent e;
  e.type = write ? TraceEvent::Type::write : TraceEvent::Type::read;
  e.tensor = tensor;
  e.index = index;
  trace_.events.push_back(e);
}

void RecordingSink::branch(BranchSite site, bool taken) {
  TraceEvent e;
  e.type = TraceEvent::Type::branch;
  e.site = site;
  e.taken = taken;
  trace_.events.push_back(e);
}

void RecordingSink::ops(std::uint64_t n) { trace_.op_count += n; }

void TeeSink::begin(std::span<const TraceTensor> tensors) {
  for (auto* s : sinks_) s->begin(tensors);
}
void TeeSink::access(std::uint32_t tensor, std::uint64_t index, bool write) {
  for (auto* s : sinks_) s->access(tensor, index, write);
}
void TeeSink::branch(BranchSite site, bool taken) {
  for (auto* s : sinks_) s->branch(site, taken);
}
void TeeSink::ops(std::uint64_t n) {
  for (auto* s : sinks_) s->ops(n);
}
void TeeSink::end() {
  for (auto* s : sinks_) s->end();
}

bool BranchPredictor::observe(BranchSite site, bool taken) {
  auto& st = state_[static_cast<std::size_t>(site) % kBranchSites];
  const bool predicted = st >= 2;
  ++branches_;
  const bool miss = predicted != taken;
  mispredictions_ += miss;
  if (taken) {
    st = static_cast<std::uint8_t>(std::min(3, st + 1));
  } else {
    st = static_cast<std::uint8_t>(std::max(0, st - 1));
  }
  return miss;
}

namespace {

PredictorResult finish(const BranchPredictor& bp, std::uint64_t other) {
  PredictorResult r;
  r.branches = bp.branches();
  r.mispredictions = bp.mispredictions();
  r.instructions = r.branches + other;
  if (r.branches > 0) {
    r.pr = static_cast<double>(r.branches) / static_cast<double>(r.instructions);
    r.mpr = static_cast<double>(r.mispredictions) / static_cast<double>(r.branches);
  }
  return r;
}

}  // namespace

PredictorResult simulate_predictor(const Trace& trace) {
  if (trace.events.empty() && trace.op_count == 0) throw Error("simulate_predictor: empty trace");
  BranchPredictor bp;
  std::uint64_t accesses = 0;
  for (const auto& e : trace.events) {
    if (e.type == TraceEvent::Type::branch) {
      bp.observe(e.site, e.taken);
    } else {
      ++accesses;
    }
  }
  return finish(bp, accesses + trace.op_count);
}

PredictorResult simulate_predictor(std::span<const bool> outcomes) {
  BranchPredictor bp;
  for (bool t : outcomes) bp.observe(BranchSite::ReluSign, t);
  return finish(bp, 0);
}

void CountingSink::begin(std::span<const TraceTensor> tensors) {
  tensors_.assign(tensors.begin(), tensors.end());
  touched_.clear();
  for (const auto& t : tensors_) touched_.emplace_back(t.size, false);
  footprint_ = {};
  reads_ = writes_ = ops_ = 0;
  predictor_ = BranchPredictor{};
}

void CountingSink::access(std::uint32_t tensor, std::uint64_t index, bool write) {
  (write ? writes_ : reads_) += 1;
  auto ref = touched_[tensor][index];
  if (!ref) {
    ref = true;
    ++footprint_[static_cast<std::size_t>(tensors_[tensor].region)];
  }
}

void CountingSink::branch(BranchSite site, bool taken) { predictor_.observe(site, taken); }

std::uint64_t CountingSink::footprint(Region r) const { return footprint_[static_cast<std::size_t>(r)]; }

PredictorResult CountingSink::predictor() const { return finish(predictor_, reads_ + writes_ + ops_); }

// ---- binary dump ----------------------------------------------------------

namespace {

constexpr char kTraceMagic[4] = {'N', 'B', 'T', 'R'};
constexpr std::uint16_t kTraceVersion = 1;
enum : std::uint8_t { kTagRead = 1, kTagWrite = 2, kTagBranch = 3, kTagOps = 4, kTagEnd = 0xFF };

template <class T>
void put(std::ofstream& out, T v) {
  char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
  out.write(b, sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw FormatError("trace dump truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

struct DumpSink::Impl {
  std::ofstream out;
  std::uint64_t ops = 0;
  bool ended = false;
};

DumpSink::DumpSink(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
  impl_->out.open(path, std::ios::binary);
  if (!impl_->out) throw FormatError("cannot write trace dump " + path.string());
}

DumpSink::~DumpSink() {
  if (!impl_->ended) end();
}

void DumpSink::begin(std::span<const TraceTensor> tensors) {
  auto& o = impl_->out;
  o.write(kTraceMagic, 4);
  put<std::uint16_t>(o, kTraceVersion);
  put<std::uint16_t>(o, 0);
  put<std::uint32_t>(o, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put<std::uint8_t>(o, static_cast<std::uint8_t>(t.region));
    put<std::uint8_t>(o, static_cast<std::uint8_t>(t.name.size()));
    o.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put<std::uint64_t>(o, t.size);
  }
}

void DumpSink::access(std::uint32_t tensor, std::uint64_t index, bool write) {
  put<std::uint8_t>(impl_->out, write ? kTagWrite : kTagRead);
  put<std::uint32_t>(impl_->out, tensor);
  put<std::uint64_t>(impl_->out, index);
}

void DumpSink::branch(BranchSite site, bool taken) {
  put<std::uint8_t>(impl_->out, kTagBranch);
  put<std::uint8_t>(impl_->out, static_cast<std::uint8_t>(site));
  put<std::uint8_t>(impl_->out, taken ? 1 : 0);
}

void DumpSink::ops(std::uint64_t n) {
  impl_->ops += n;
  put<std::uint8_t>(impl_->out, kTagOps);
  put<std::uint64_t>(impl_->out, n);
}

void DumpSink::end() {
  if (impl_->ended) return;
  impl_->ended = true;
  put<std::uint8_t>(impl_->out, kTagEnd);
  put<std::uint64_t>(impl_->out, impl_->ops);
  impl_->out.flush();
}

Trace read_trace_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open trace dump " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kTraceMagic, 4) != 0) throw FormatError("not a trace dump");
  if (get<std::uint16_t>(in) != kTraceVersion) throw FormatError("unsupported trace dump version");
  get<std::uint16_t>(in);
  Trace t;
  const auto n = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n; ++i) {
    TraceTensor tt;
    tt.region = static_cast<Region>(get<std::uint8_t>(in));
    tt.name.resize(get<std::uint8_t>(in));
    in.read(tt.name.data(), static_cast<std::streamsize>(tt.name.size()));
    tt.size = get<std::uint64_t>(in);
    t.tensors.push_back(std::move(tt));
  }
  for (;;) {
    const auto tag = get<std::uint8_t>(in);
    TraceEvent e;
    switch (tag) {
      case kTagRead:
      case kTagWrite:
        e.type = tag == kTagRead ? TraceEvent::Type::read : TraceEvent::Type::write;
        e.tensor = get<std::uint32_t>(in);
        e.index = get<std::uint64_t>(in);
        t.events.push_back(e);
        break;
      case kTagBranch:
        e.type = TraceEvent::Type::branch;
        e.site = static_cast<BranchSite>(get<std::uint8_t>(in));
        e.taken = get<std::uint8_t>(in) != 0;
        t.events.push_back(e);
        break;
      case kTagOps:
        get<std::uint64_t>(in);
        break;
      case kTagEnd:
        t.op_count = get<std::uint64_t>(in);
        return t;
      default:
        throw FormatError("unknown trace record tag " + std::to_string(tag));
    }
  }
}

// ---- tracing --------------------------------------------------------------

LayerOutput trace_layer(const LayerSpec& spec, const LayerParams& params, const Tensor& input, TraceSink& sink,
                        double budget, const PoolSwitches* switches) {
  const LayerCounts c = analytic_counts(spec, &params);
  const double size = static_cast<double>(std::max(c.ops, c.mem_acc()));
  if (size > budget) {
    throw BudgetError(std::string(to_string(spec.kind)) + " layer needs " + std::to_string(c.ops) + " ops and " +
                      std::to_string(c.mem_acc()) + " accesses, over the trace budget of " +
                      std::to_string(static_cast<std::uint64_t>(budget)) +
                      "; analytic-only configuration, use the analytic characterization path");
  }
  const auto tensors = trace_tensors(spec);
  sink.begin(tensors);
  detail::TraceProbe probe{&sink};
  LayerOutput out = detail::dispatch(spec, params, input, switches, probe);
  sink.end();
  return out;
}

RecordedTrace record_trace(const LayerSpec& spec, const LayerParams& params, const Tensor& input, double budget,
                           const PoolSwitches* switches) {
  RecordingSink sink;
  LayerOutput out = trace_layer(spec, params, input, sink, budget, switches);
  return {sink.take(), std::move(out)};
}

}  // namespace nnbench
