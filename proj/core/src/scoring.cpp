#include "nnbench/scoring.hpp"

#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "nnbench/csv.hpp"
#include "nnbench/error.hpp"

namespace nnbench {

double gops(double ops_giga, double time_s) {
  if (!(time_s > 0)) throw Error("gops: time must be > 0");
  return ops_giga / time_s;
}

std::optional<double> gopj(double ops_giga, std::optional<double> energy_j) {
  if (!energy_j || !(*energy_j > 0)) return std::nullopt;
  return ops_giga / *energy_j;
}

std::optional<double> silicon_eff(double acc, double ref_acc, std::optional<double> area_mm2) {
  if (!area_mm2) return std::nullopt;
  if (!(*area_mm2 > 0)) throw Error("silicon_eff: area must be > 0");
  if (!(ref_acc > 0)) throw Error("silicon_eff: ref_acc must be > 0");
  return (acc / ref_acc) / *area_mm2;
}

std::optional<double> geomean(std::span<const std::optional<double>> values, std::size_t* used) {
  double log_sum = 0.0;
  std::size_t n = 0;
  bool zero = false;
  for (const auto& v : values) {
    if (!v) continue;
    ++n;
    if (*v <= 0.0) zero = true;
    else log_sum += std::log(*v);
  }
  if (used) *used = n;
  if (n == 0) return std::nullopt;
  return zero ? 0.0 : std::exp(log_sum / static_cast<double>(n));
}

SynthesizedScore synthesized_score(std::span<const ScoreInput> inputs, const ScalingHooks& hooks) {
  SynthesizedScore s;
  std::vector<std::optional<double>> products;
  for (const auto& in : inputs) {
    const auto e = gopj(in.ops, in.energy);
    const auto si = silicon_eff(in.acc, in.ref_acc, in.area);
    if (!e || !si) {
      s.excluded.push_back(in.benchmark);
      continue;
    }
    s.included.push_back(in.benchmark);
    products.push_back(hooks.f(*e) * hooks.g(gops(in.ops, in.time)) * hooks.h(*si));
  }
  s.value = geomean(products);
  if (!s.value) s.note = "no benchmark has energy, time and area; efficiency score is null";
  else if (!s.excluded.empty()) s.note = "benchmarks without energy or area excluded";
  return s;
}

std::vector<ScoreInput> score_inputs(std::span<const RunResult> results, std::optional<double> area_mm2) {
  std::vector<ScoreInput> out;
  for (const auto& r : results) {
    if (r.status != RunStatus::ok) continue;
    ScoreInput in;
    in.benchmark = r.benchmark;
    in.ops = r.giga_ops;
    in.time = r.wall_time;
    in.energy = r.energy;
    in.acc = r.acc;
    in.ref_acc = 1.0;
    in.area = area_mm2;
    out.push_back(std::move(in));
  }
  return out;
}

ScoreCard score_card(const std::string& backend, std::span<const ScoreInput> inputs, const ScalingHooks& hooks) {
  ScoreCard c;
  c.backend = backend;
  std::vector<std::optional<double>> g, e, s;
  for (const auto& in : inputs) {
    ScoreRow row;
    row.benchmark = in.benchmark;
    row.ops = in.ops;
    row.time = in.time;
    row.gops = gops(in.ops, in.time);
    row.gopj = gopj(in.ops, in.energy);
    row.silicon_eff = silicon_eff(in.acc, in.ref_acc, in.area);
    row.acc = in.acc;
    g.push_back(row.gops);
    e.push_back(row.gopj);
    s.push_back(row.silicon_eff);
    c.rows.push_back(std::move(row));
  }
  c.geomean_gops = geomean(g, &c.gops_count);
  c.geomean_gopj = geomean(e, &c.gopj_count);
  c.geomean_silicon_eff = geomean(s, &c.silicon_count);
  c.efficiency_score = synthesized_score(inputs, hooks);
  return c;
}

ComparisonTable comparison_table(const std::string& backend, std::span<const ScoreInput> results,
                                 const std::string& baseline, std::span<const ScoreInput> baseline_results) {
  std::map<std::string, const ScoreInput*> base;
  for (const auto& b : baseline_results) base[b.benchmark] = &b;
  ComparisonTable t;
  t.backend = backend;
  t.baseline = baseline;
  std::vector<std::optional<double>> sp, en;
  for (const auto& r : results) {
    ComparisonRow row;
    row.benchmark = r.benchmark;
    if (auto it = base.find(r.benchmark); it != base.end()) {
      row.speedup = it->second->time / r.time;
      if (r.energy && it->second->energy && *it->second->energy > 0) {
        row.normalized_energy = *r.energy / *it->second->energy;
      }
    }
    sp.push_back(row.speedup);
    en.push_back(row.normalized_energy);
    t.rows.push_back(std::move(row));
  }
  t.geomean_speedup = geomean(sp);
  t.geomean_energy = geomean(en);
  return t;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const ScoreCard& c) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"benchmark", r.benchmark},
                    {"giga_ops", r.ops},
                    {"time", r.time},
                    {"gops", r.gops},
                    {"gopj", opt(r.gopj)},
                    {"silicon_eff", opt(r.silicon_eff)},
                    {"acc", r.acc}});
  }
  return {{"backend", c.backend},
          {"rows", rows},
          {"geomean",
           {{"gops", opt(c.geomean_gops)},
            {"gops_count", c.gops_count},
            {"gopj", opt(c.geomean_gopj)},
            {"gopj_count", c.gopj_count},
            {"silicon_eff", opt(c.geomean_silicon_eff)},
            {"silicon_eff_count", c.silicon_count}}},
          {"efficiency_score",
           {{"value", opt(c.efficiency_score.value)},
            {"included", c.efficiency_score.included},
            {"excluded", c.efficiency_score.excluded},
            {"note", c.efficiency_score.note}}}};
}

nlohmann::json to_json(const ComparisonTable& t) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"benchmark", r.benchmark}, {"speedup", opt(r.speedup)}, {"normalized_energy", opt(r.normalized_energy)}});
  }
  return {{"backend", t.backend},
          {"baseline", t.baseline},
          {"rows", rows},
          {"geomean", {{"speedup", opt(t.geomean_speedup)}, {"normalized_energy", opt(t.geomean_energy)}}}};
}

std::vector<std::string> score_csv_header() {
  return {"backend", "benchmark", "giga_ops", "time", "gops", "gopj", "silicon_eff", "acc"};
}

std::vector<std::vector<std::string>> score_csv_rows(const ScoreCard& c) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : c.rows) {
    out.push_back({c.backend, r.benchmark, format_real(r.ops), format_real(r.time), format_real(r.gops),
                   format_real(r.gopj), format_real(r.silicon_eff), format_real(r.acc)});
  }
  out.push_back({c.backend, "geomean", "null", "null", format_real(c.geomean_gops), format_real(c.geomean_gopj),
                 format_real(c.geomean_silicon_eff), "null"});
  return out;
}

std::vector<std::string> comparison_csv_header() {
  return {"backend", "baseline", "benchmark", "speedup", "normalized_energy"};
}

std::vector<std::vector<std::string>> comparison_csv_rows(const ComparisonTable& t) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : t.rows) {
    out.push_back({t.backend, t.baseline, r.benchmark, format_real(r.speedup), format_real(r.normalized_energy)});
  }
  out.push_back({t.backend, t.baseline, "geomean", format_real(t.geomean_speedup), format_real(t.geomean_energy)});
  return out;
}

}  // namespace nnbench
