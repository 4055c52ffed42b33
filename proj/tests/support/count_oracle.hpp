#pragma once
// Closed-form memory-access and operation counts of the pinned loop nests,
// derived per kind from the nest description (bias once per channel tile
// row, valid-column reads per kernel column, one MAC = 2 ops, ...). Used to
// check both the traces and the library's analytic model.

#include <cstdint>
#include <optional>
#include <vector>

#include "nnbench/layer.hpp"
#include "nnbench/params.hpp"

namespace oracle {

struct Counts {
  std::uint64_t mem_acc = 0;
  std::uint64_t ops = 0;
};

/// Conv, PoolAvg, PoolMax, FC, ReLU, Sigmoid, BN; nullopt for other kinds.
/// Sparse conv/fc counts use the nonzero pattern of `params`.
std::optional<Counts> closed_form_counts(const nnbench::LayerSpec& spec, const nnbench::LayerParams* params);

}  // namespace oracle
