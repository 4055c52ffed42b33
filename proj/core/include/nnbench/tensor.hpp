#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nnbench {

/// Ordered list of positive extents. 4-D tensors use (batch, channels,
/// height, width); recurrent data uses (timesteps, batch, features).
class TensorShape {
 public:
  TensorShape() = default;
  TensorShape(std::initializer_list<std::uint64_t> dims);
  explicit TensorShape(std::vector<std::uint64_t> dims);

  std::size_t rank() const noexcept { return dims_.size(); }
  std::span<const std::uint64_t> dims() const noexcept { return dims_; }
  std::uint64_t operator[](std::size_t i) const { return dims_.at(i); }
  std::uint64_t element_count() const noexcept { return count_; }
  bool empty() const noexcept { return dims_.empty(); }

  std::string to_string() const;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;

 private:
  std::vector<std::uint64_t> dims_;
  std::uint64_t count_ = 0;
};

/// Dense row-major fp32 tensor (last dimension fastest).
struct Tensor {
  TensorShape shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(TensorShape s);
  Tensor(TensorShape s, std::vector<float> values);

  std::size_t size() const noexcept { return data.size(); }
  float& operator[](std::size_t i) noexcept { return data[i]; }
  float operator[](std::size_t i) const noexcept { return data[i]; }

  bool all_finite() const noexcept;
  /// Same data viewed under another shape with equal element count.
  Tensor reshaped(const TensorShape& s) const;
};

/// Uniform values in [lo, hi) from the SplitMix64 stream seeded with `seed`.
Tensor random_tensor(const TensorShape& shape, std::uint64_t seed, float lo = -1.0f,
                     float hi = 1.0f);

}  // namespace nnbench
