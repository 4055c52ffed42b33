#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nnbench/trace.hpp"

namespace nnbench {

/// Buckets [2^b, 2^(b+1)) for b = 0..30; distance 0 lands in bucket 0 and the
/// last bucket is open-ended (>= 2^30).
inline constexpr std::size_t kReuseBuckets = 31;
using ReuseHistogram = std::array<std::uint64_t, kReuseBuckets>;

std::size_t reuse_bucket(std::uint64_t distance) noexcept;

struct ReuseStats {
  std::uint64_t accesses = 0;
  std::uint64_t reuses = 0;             ///< accesses that are not first touches
  std::optional<double> average;        ///< absent when there are no reuses
  ReuseHistogram histogram{};
  std::uint64_t max_distance = 0;
};

/// Exact reuse distances in O(N log N): a Fenwick tree over access times marks
/// the most recent access of every element; the distance of a reuse is the
/// number of marks strictly between the previous and the current access.
/// Times are renumbered when the tree fills up, so memory stays proportional
/// to the number of distinct elements.
class ReuseTracker {
 public:
  /// Keys must lie in [0, key_space).
  explicit ReuseTracker(std::uint64_t key_space);

  /// Distance for this access, or nullopt on a first touch.
  std::optional<std::uint64_t> access(std::uint64_t key);

 private:
  void compact();
  void add(std::uint64_t pos, std::int32_t delta);
  std::uint64_t prefix(std::uint64_t pos) const;  ///< marks in [1, pos]

  std::vector<std::uint32_t> last_;   // per key: time of last access, 0 = never
  std::vector<std::uint64_t> owner_;  // per time: key accessed then
  std::vector<std::int32_t> tree_;    // Fenwick tree, 1-based
  std::uint64_t now_ = 0;
  std::uint64_t live_ = 0;
};

/// Streaming reuse-distance accumulator over a layer trace.
class ReuseSink final : public TraceSink {
 public:
  /// With `keep` set, every per-access result is stored (tests and tools).
  explicit ReuseSink(bool keep = false) : keep_(keep) {}
  void begin(std::span<const TraceTensor> tensors) override;
  void access(std::uint32_t tensor, std::uint64_t index, bool write) override;
  void branch(BranchSite, bool) override {}
  void ops(std::uint64_t) override {}

  ReuseStats stats() const;
  const std::vector<std::optional<std::uint64_t>>& distances() const { return kept_; }

 private:
  bool keep_;
  std::vector<std::uint64_t> base_;
  std::optional<ReuseTracker> tracker_;
  std::vector<std::optional<std::uint64_t>> kept_;
  ReuseStats stats_;
  unsigned __int128 sum_ = 0;
};

/// Per-access distances over an arbitrary address sequence (fast algorithm).
std::vector<std::optional<std::uint64_t>> reuse_distances_fast(std::span<const std::uint64_t> addresses);
/// Quadratic oracle: scan backwards collecting distinct addresses.
std::vector<std::optional<std::uint64_t>> reuse_distances_naive(std::span<const std::uint64_t> addresses);

ReuseStats summarize_reuse(std::span<const std::optional<std::uint64_t>> distances);

/// Addresses of the memory events of a trace (tensor-major flat keys).
std::vector<std::uint64_t> trace_addresses(const Trace& trace);
ReuseStats reuse_distances(const Trace& trace);

}  // namespace nnbench
