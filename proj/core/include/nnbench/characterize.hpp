#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nnbench/analytic.hpp"
#include "nnbench/reuse.hpp"
#include "nnbench/trace.hpp"

namespace nnbench {

struct CharacteristicVector {
  std::uint64_t mem_acc = 0;
  std::optional<double> redist_avg;
  std::optional<ReuseHistogram> redist_hist;
  std::uint64_t in_mem = 0;
  std::uint64_t out_mem = 0;
  std::uint64_t wgh_mem = 0;
  std::uint64_t ops = 0;
  std::optional<double> op_mem;  ///< ops / mem_acc; absent when mem_acc = 0
  ComPtt com_ptt = ComPtt::RD;
  std::optional<double> pr;
  std::optional<double> mpr;
  bool traced = false;  ///< false: analytic-only (trace-derived fields absent)
};

/// Closed-form fields only; redist, pr and mpr are absent.
CharacteristicVector analytic_characteristics(const LayerSpec& spec, const LayerParams* params = nullptr);

struct CharacterizeOptions {
  double budget = kDefaultOpsBudget;
  const PoolSwitches* switches = nullptr;  ///< max-unpool layers
};

/// Traces the layer when it fits the budget, otherwise falls back to the
/// analytic vector.
CharacteristicVector characterize(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                                  const CharacterizeOptions& options = {});

/// Instantiates synthetic parameters and input from `seed` only when the
/// layer is within budget, so extreme configurations never allocate.
CharacteristicVector characterize_spec(const LayerSpec& spec, std::uint64_t seed,
                                       double budget = kDefaultOpsBudget);

/// One CSV row per vector; absent values are written as "null".
std::vector<std::string> characteristic_csv_header();
std::vector<std::string> characteristic_csv_fields(const CharacteristicVector& v);
nlohmann::json to_json(const CharacteristicVector& v);

}  // namespace nnbench
