#pragma once

#include <cstdint>

namespace nnbench {

/// SplitMix64 (Steele, Lea & Flood). The exact bit recipe is part of the
/// reproducibility contract; see docs/prng.md.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix(state_);
  }

  /// Top 24 bits as an integer in [0, 2^24).
  constexpr std::uint32_t next24() noexcept { return static_cast<std::uint32_t>(next() >> 40); }

  /// Uniform in [0, 1) on the 2^-24 grid; exactly representable in fp32.
  constexpr double next_unit() noexcept { return next24() * (1.0 / 16777216.0); }

  /// Uniform in [0, n) by multiply-shift on the top 32 bits.
  constexpr std::uint64_t next_below(std::uint64_t n) noexcept {
    if (n <= 0xFFFFFFFFULL) {
      return ((next() >> 32) * n) >> 32;
    }
    return next() % n;
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Seed of the independent stream for tensor `slot` of layer `layer`.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t layer,
                                    std::uint64_t slot) noexcept {
  return seed ^ SplitMix64::mix((layer << 16) | slot);
}

/// Synthetic weight in the open interval (-0.5, 0.5): odd multiples of 2^-25,
/// never exactly zero so that zero always means "pruned".
constexpr float synthetic_weight(SplitMix64& rng) noexcept {
  const std::int64_t u = rng.next24();
  const std::int64_t odd = 2 * u + 1 - (std::int64_t{1} << 24);
  return static_cast<float>(static_cast<double>(odd) * (1.0 / 33554432.0));
}

}  // namespace nnbench
