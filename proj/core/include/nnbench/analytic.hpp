#pragma once

#include <cstdint>

#include "nnbench/layer.hpp"
#include "nnbench/params.hpp"

namespace nnbench {

/// Closed-form counts of the canonical loop nest of one layer.
struct LayerCounts {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t ops = 0;
  std::uint64_t branches = 0;  ///< data-dependent branch events
  std::uint64_t in_mem = 0;    ///< distinct input elements touched
  std::uint64_t out_mem = 0;   ///< distinct output (and scratch state) elements
  std::uint64_t wgh_mem = 0;   ///< distinct parameter elements touched
  /// False when a sparse count had to be estimated from the density because
  /// the nonzero positions were unknown (padded sparse conv without params).
  bool exact = true;

  std::uint64_t mem_acc() const noexcept { return reads + writes; }
};

/// `params`, when given, pins sparse counts to the actual nonzero pattern.
LayerCounts analytic_counts(const LayerSpec& spec, const LayerParams* params = nullptr);

/// Multiply-accumulate count of a conv/deconv/fc layer (dense unless params
/// or the density say otherwise).
std::uint64_t analytic_macs(const LayerSpec& spec, const LayerParams* params = nullptr);

/// Estimate of the largest reuse distance of the canonical nest, in elements.
/// Conv/deconv: the distinct elements touched by one output-channel-tile pass
/// over one image, which separates consecutive uses of an input element (more
/// than one channel tile) or of a weight (more than one image). Other kinds:
/// the total footprint.
double reuse_footprint_bound(const LayerSpec& spec);

}  // namespace nnbench
