#include "nnbench/tensor.hpp"

#include <cmath>
#include <limits>

#include "nnbench/error.hpp"
#include "nnbench/rng.hpp"

namespace nnbench {

namespace {

std::uint64_t checked_count(const std::vector<std::uint64_t>& dims) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) {
      throw ShapeError("extent " + std::to_string(i) + " is zero");
    }
    if (count > std::numeric_limits<std::uint64_t>::max() / dims[i]) {
      throw ShapeError("element count overflows 64 bits");
    }
    count *= dims[i];
  }
  return dims.empty() ? 0 : count;
}

}  // namespace

TensorShape::TensorShape(std::initializer_list<std::uint64_t> dims)
    : TensorShape(std::vector<std::uint64_t>(dims)) {}

TensorShape::TensorShape(std::vector<std::uint64_t> dims)
    : dims_(std::move(dims)), count_(checked_count(dims_)) {}

std::string TensorShape::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims_[i]);
  }
  return s + "]";
}

Tensor::Tensor(TensorShape s) : shape(std::move(s)), data(shape.element_count(), 0.0f) {}

Tensor::Tensor(TensorShape s, std::vector<float> values) : shape(std::move(s)), data(std::move(values)) {
  if (data.size() != shape.element_count()) {
    throw ShapeError("tensor data has " + std::to_string(data.size()) + " values, shape " +
                     shape.to_string() + " needs " + std::to_string(shape.element_count()));
  }
}

bool Tensor::all_finite() const noexcept {
  for (float v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor Tensor::reshaped(const TensorShape& s) const {
  if (s.element_count() != shape.element_count()) {
    throw ShapeError("cannot reshape " + shape.to_string() + " to " + s.to_string());
  }
  Tensor t;
  t.shape = s;
  t.data = data;
  return t;
}

Tensor random_tensor(const TensorShape& shape, std::uint64_t seed, float lo, float hi) {
  Tensor t(shape);
  SplitMix64 rng(seed);
  const double span = static_cast<double>(hi) - lo;
  for (auto& v : t.data) {
    v = static_cast<float>(lo + span * rng.next_unit());
  }
  return t;
}

}  // namespace nnbench
