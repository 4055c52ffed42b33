#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nnbench/harness.hpp"

namespace nnbench {

double gops(double ops_giga, double time_s);
std::optional<double> gopj(double ops_giga, std::optional<double> energy_j);
/// (acc / ref_acc) / area; absent without an area.
std::optional<double> silicon_eff(double acc, double ref_acc, std::optional<double> area_mm2);

struct ScoreInput {
  std::string benchmark;
  double ops = 0.0;    ///< giga-operations
  double time = 0.0;   ///< seconds
  std::optional<double> energy;
  double acc = 1.0;
  double ref_acc = 1.0;
  std::optional<double> area;
};

/// Monotone hooks on energy, performance and silicon efficiency.
struct ScalingHooks {
  std::function<double(double)> f = [](double x) { return x; };
  std::function<double(double)> g = [](double x) { return x; };
  std::function<double(double)> h = [](double x) { return x; };
};

struct SynthesizedScore {
  std::optional<double> value;        ///< absent when no benchmark has every operand
  std::vector<std::string> included;  ///< benchmarks that entered the mean
  std::vector<std::string> excluded;
  std::string note;
};

/// Geometric mean over benchmarks of f(gopj) * g(gops) * h(silicon_eff).
/// Benchmarks missing energy or area are excluded and listed.
SynthesizedScore synthesized_score(std::span<const ScoreInput> inputs, const ScalingHooks& hooks = {});

/// Geometric mean of the present entries; absent when none are.
std::optional<double> geomean(std::span<const std::optional<double>> values, std::size_t* used = nullptr);

struct ScoreRow {
  std::string benchmark;
  double ops = 0.0;
  double time = 0.0;
  double gops = 0.0;
  std::optional<double> gopj;
  std::optional<double> silicon_eff;
  double acc = 0.0;
};

struct ScoreCard {
  std::string backend;
  std::vector<ScoreRow> rows;
  std::optional<double> geomean_gops;
  std::optional<double> geomean_gopj;
  std::optional<double> geomean_silicon_eff;
  std::size_t gops_count = 0, gopj_count = 0, silicon_count = 0;
  SynthesizedScore efficiency_score;
};

/// Builds score inputs from successful runs; ref_acc comes from the
/// reference backend, which reproduces its own golden exactly (1.0).
std::vector<ScoreInput> score_inputs(std::span<const RunResult> results, std::optional<double> area_mm2);
ScoreCard score_card(const std::string& backend, std::span<const ScoreInput> inputs, const ScalingHooks& hooks = {});

struct ComparisonRow {
  std::string benchmark;
  std::optional<double> speedup;            ///< t(baseline) / t(backend)
  std::optional<double> normalized_energy;  ///< E(backend) / E(baseline)
};

struct ComparisonTable {
  std::string baseline;
  std::string backend;
  std::vector<ComparisonRow> rows;
  std::optional<double> geomean_speedup;
  std::optional<double> geomean_energy;
};

/// Rows follow the backend's benchmark order; a benchmark missing from the
/// baseline yields null cells.
ComparisonTable comparison_table(const std::string& backend, std::span<const ScoreInput> results,
                                 const std::string& baseline, std::span<const ScoreInput> baseline_results);

nlohmann::json to_json(const ScoreCard& c);
nlohmann::json to_json(const ComparisonTable& t);
std::vector<std::string> score_csv_header();
std::vector<std::vector<std::string>> score_csv_rows(const ScoreCard& c);
std::vector<std::string> comparison_csv_header();
std::vector<std::vector<std::string>> comparison_csv_rows(const ComparisonTable& t);

}  // namespace nnbench
