#include "nnbench/reuse.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>
#include <unordered_set>

#include "nnbench/error.hpp"

namespace nnbench {

std::size_t reuse_bucket(std::uint64_t distance) noexcept {
  if (distance == 0) return 0;
  const auto b = static_cast<std::size_t>(std::bit_width(distance) - 1);
  return std::min(b, kReuseBuckets - 1);
}

namespace {
constexpr std::uint64_t kMinCapacity = 1 << 16;
}

ReuseTracker::ReuseTracker(std::uint64_t key_space)
    : last_(key_space, 0), owner_(kMinCapacity + 1, 0), tree_(kMinCapacity + 1, 0) {
  if (key_space >= (std::uint64_t{1} << 40)) throw Error("reuse tracker: key space too large");
}

void ReuseTracker::add(std::uint64_t pos, std::int32_t delta) {
  for (; pos < tree_.size(); pos += pos & (~pos + 1)) tree_[pos] += delta;
}

std::uint64_t ReuseTracker::prefix(std::uint64_t pos) const {
  std::int64_t s = 0;
  for (; pos > 0; pos &= pos - 1) s += tree_[pos];
  return static_cast<std::uint64_t>(s);
}

void ReuseTracker::compact() {
  // Renumber live times 1..live_ preserving order, then size the tree so that
  // at least as many new accesses fit before the next compaction.
  const std::uint64_t cap = std::max<std::uint64_t>(kMinCapacity, 2 * live_ + 2);
  if (cap >= 0xFFFFFFFFULL) throw Error("reuse tracker: too many distinct elements");
  std::vector<std::uint64_t> owner(cap + 1, 0);
  std::uint64_t t = 0;
  for (std::uint64_t old = 1; old <= now_; ++old) {
    const std::uint64_t key = owner_[old];
    if (last_[key] == old) {
      owner[++t] = key;
      last_[key] = static_cast<std::uint32_t>(t);
    }
  }
  owner_ = std::move(owner);
  tree_.assign(cap + 1, 0);
  // Linear-time Fenwick build over the t leading marks.
  for (std::uint64_t i = 1; i <= cap; ++i) {
    if (i <= t) tree_[i] += 1;
    const std::uint64_t parent = i + (i & (~i + 1));
    if (parent <= cap) tree_[parent] += tree_[i];
  }
  now_ = t;
}

std::optional<std::uint64_t> ReuseTracker::access(std::uint64_t key) {
  if (now_ + 1 >= tree_.size()) compact();
  const std::uint64_t t = ++now_;
  const std::uint32_t prev = last_[key];
  std::optional<std::uint64_t> d;
  if (prev != 0) {
    d = prefix(t - 1) - prefix(prev);
    add(prev, -1);
  } else {
    ++live_;
  }
  add(t, 1);
  owner_[t] = key;
  last_[key] = static_cast<std::uint32_t>(t);
  return d;
}

void ReuseSink::begin(std::span<const TraceTensor> tensors) {
  base_.clear();
  std::uint64_t total = 0;
  for (const auto& t : tensors) {
    base_.push_back(total);
    total += t.size;
  }
  tracker_.emplace(total);
  kept_.clear();
  stats_ = ReuseStats{};
  sum_ = 0;
}

void ReuseSink::access(std::uint32_t tensor, std::uint64_t index, bool) {
  const auto d = tracker_->access(base_[tensor] + index);
  ++stats_.accesses;
  if (d) {
    ++stats_.reuses;
    sum_ += *d;
    ++stats_.histogram[reuse_bucket(*d)];
    stats_.max_distance = std::max(stats_.max_distance, *d);
  }
  if (keep_) kept_.push_back(d);
}

ReuseStats ReuseSink::stats() const {
  ReuseStats s = stats_;
  if (s.reuses > 0) s.average = static_cast<double>(sum_) / static_cast<double>(s.reuses);
  return s;
}

std::vector<std::optional<std::uint64_t>> reuse_distances_fast(std::span<const std::uint64_t> addresses) {
  std::unordered_map<std::uint64_t, std::uint64_t> dense;
  std::vector<std::uint64_t> keys;
  keys.reserve(addresses.size());
  for (auto a : addresses) keys.push_back(dense.try_emplace(a, dense.size()).first->second);
  ReuseTracker tracker(dense.size());
  std::vector<std::optional<std::uint64_t>> out;
  out.reserve(keys.size());
  for (auto k : keys) out.push_back(tracker.access(k));
  return out;
}

std::vector<std::optional<std::uint64_t>> reuse_distances_naive(std::span<const std::uint64_t> addresses) {
  std::vector<std::optional<std::uint64_t>> out(addresses.size());
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t i = 0; i < addresses.size(); ++i) {
    seen.clear();
    for (std::size_t j = i; j-- > 0;) {
      if (addresses[j] == addresses[i]) {
        out[i] = seen.size();
        break;
      }
      seen.insert(addresses[j]);
    }
  }
  return out;
}

ReuseStats summarize_reuse(std::span<const std::optional<std::uint64_t>> distances) {
  ReuseStats s;
  unsigned __int128 sum = 0;
  for (const auto& d : distances) {
    ++s.accesses;
    if (!d) continue;
    ++s.reuses;
    sum += *d;
    ++s.histogram[reuse_bucket(*d)];
    s.max_distance = std::max(s.max_distance, *d);
  }
  if (s.reuses > 0) s.average = static_cast<double>(sum) / static_cast<double>(s.reuses);
  return s;
}

std::vector<std::uint64_t> trace_addresses(const Trace& trace) {
  std::vector<std::uint64_t> base;
  std::uint64_t total = 0;
  for (const auto& t : trace.tensors) {
    base.push_back(total);
    total += t.size;
  }
  std::vector<std::uint64_t> out;
  for (const auto& e : trace.events) {
    if (e.type != TraceEvent::Type::branch) out.push_back(base.at(e.tensor) + e.index);
  }
  return out;
}

ReuseStats reuse_distances(const Trace& trace) {
  if (trace.events.empty()) throw Error("reuse_distances: empty trace");
  ReuseSink sink;
  sink.begin(trace.tensors);
  for (const auto& e : trace.events) {
    if (e.type != TraceEvent::Type::branch) sink.access(e.tensor, e.index, e.type == TraceEvent::Type::write);
  }
  return sink.stats();
}

}  // namespace nnbench
