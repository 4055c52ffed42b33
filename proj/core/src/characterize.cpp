#include "nnbench/characterize.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "nnbench/csv.hpp"
#include "nnbench/error.hpp"

namespace nnbench {

namespace {

void set_op_mem(CharacteristicVector& v) {
  if (v.mem_acc > 0) v.op_mem = static_cast<double>(v.ops) / static_cast<double>(v.mem_acc);
}

bool within_budget(const LayerCounts& c, double budget) {
  return static_cast<double>(std::max(c.ops, c.mem_acc())) <= budget;
}

}  // namespace

CharacteristicVector analytic_characteristics(const LayerSpec& spec, const LayerParams* params) {
  const LayerCounts c = analytic_counts(spec, params);
  CharacteristicVector v;
  v.mem_acc = c.mem_acc();
  v.in_mem = c.in_mem;
  v.out_mem = c.out_mem;
  v.wgh_mem = c.wgh_mem;
  v.ops = c.ops;
  v.com_ptt = computation_pattern(spec.kind);
  set_op_mem(v);
  return v;
}

CharacteristicVector characterize(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                                  const CharacterizeOptions& options) {
  const LayerCounts c = analytic_counts(spec, &params);
  if (!within_budget(c, options.budget)) return analytic_characteristics(spec, &params);

  CountingSink counts;
  ReuseSink reuse;
  TeeSink tee({&counts, &reuse});
  trace_layer(spec, params, input, tee, options.budget, options.switches);

  CharacteristicVector v;
  v.traced = true;
  v.mem_acc = counts.reads() + counts.writes();
  v.ops = counts.ops_count();
  v.in_mem = counts.footprint(Region::input);
  v.out_mem = counts.footprint(Region::output);
  v.wgh_mem = counts.footprint(Region::weight);
  v.com_ptt = computation_pattern(spec.kind);
  set_op_mem(v);
  const ReuseStats rs = reuse.stats();
  v.redist_avg = rs.average;
  v.redist_hist = rs.histogram;
  const PredictorResult p = counts.predictor();
  v.pr = p.pr;
  v.mpr = p.mpr;
  return v;
}

CharacteristicVector characterize_spec(const LayerSpec& spec, std::uint64_t seed, double budget) {
  if (!within_budget(analytic_counts(spec), budget)) return analytic_characteristics(spec);
  const LayerParams params = instantiate_layer_params(spec, seed, 0);
  const Tensor input = benchmark_input(spec.input_shape, seed);
  std::optional<PoolSwitches> sw;
  if (spec.kind == LayerKind::UnpoolMax) sw = synthetic_switches(spec, seed);
  CharacterizeOptions opt;
  opt.budget = budget;
  opt.switches = sw ? &*sw : nullptr;
  return characterize(spec, params, input, opt);
}

std::vector<std::string> characteristic_csv_header() {
  std::vector<std::string> h = {"mem_acc", "redist_avg", "in_mem", "out_mem", "wgh_mem", "ops",
                                "op_mem",  "com_ptt",    "pr",     "mpr",     "traced"};
  for (std::size_t b = 0; b < kReuseBuckets; ++b) h.push_back("redist_b" + std::to_string(b));
  return h;
}

std::vector<std::string> characteristic_csv_fields(const CharacteristicVector& v) {
  std::vector<std::string> f = {std::to_string(v.mem_acc),
                                format_real(v.redist_avg),
                                std::to_string(v.in_mem),
                                std::to_string(v.out_mem),
                                std::to_string(v.wgh_mem),
                                std::to_string(v.ops),
                                format_real(v.op_mem),
                                std::string(to_string(v.com_ptt)),
                                format_real(v.pr),
                                format_real(v.mpr),
                                v.traced ? "true" : "false"};
  for (std::size_t b = 0; b < kReuseBuckets; ++b) {
    f.push_back(v.redist_hist ? std::to_string((*v.redist_hist)[b]) : "null");
  }
  return f;
}

nlohmann::json to_json(const CharacteristicVector& v) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& d) { return d ? json(*d) : json(nullptr); };
  json j;
  j["mem_acc"] = v.mem_acc;
  j["redist_avg"] = opt(v.redist_avg);
  j["redist_hist"] = v.redist_hist ? json(*v.redist_hist) : json(nullptr);
  j["in_mem"] = v.in_mem;
  j["out_mem"] = v.out_mem;
  j["wgh_mem"] = v.wgh_mem;
  j["ops"] = v.ops;
  j["op_mem"] = opt(v.op_mem);
  j["com_ptt"] = to_string(v.com_ptt);
  j["pr"] = opt(v.pr);
  j["mpr"] = opt(v.mpr);
  j["traced"] = v.traced;
  return j;
}

}  // namespace nnbench
