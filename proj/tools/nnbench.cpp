// nnbench command-line front end: list, characterize, run, cluster, score,
// golden, export-specs. Exit codes: 0 ok, 1 benchmark failure, 2 usage or
// configuration error, 3 backend load error.
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nnbench/analytic.hpp"
#include "nnbench/characterize.hpp"
#include "nnbench/csv.hpp"
#include "nnbench/diversity.hpp"
#include "nnbench/error.hpp"
#include "nnbench/harness.hpp"
#include "nnbench/kernels.hpp"
#include "nnbench/network.hpp"
#include "nnbench/registry.hpp"
#include "nnbench/report.hpp"
#include "nnbench/scoring.hpp"
#include "nnbench/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nnbench;

namespace {

enum Exit { kOk = 0, kBenchFailure = 1, kUsage = 2, kBackendLoad = 3 };

struct Global {
  std::string out_root;
  std::string run_id;
  std::optional<std::int64_t> timestamp;
  std::uint64_t seed = 42;
  std::vector<std::string> argv;
};

struct Context {
  Global g;
  std::int64_t epoch = 0;
  fs::path dir;  // <out>/<run-id>

  RunManifest manifest(std::vector<BackendDescriptor> backends, double budget) const {
    RunManifest m;
    m.tool_version = kToolVersion;
    m.registry_version = kRegistryVersion;
    m.seed = g.seed;
    m.backends = std::move(backends);
    m.timestamp = iso_timestamp(epoch);
    m.command = g.argv;
    m.ops_budget = budget;
    return m;
  }
};

Context make_context(const Global& g) {
  Context c;
  c.g = g;
  c.epoch = g.timestamp ? *g.timestamp : manifest_epoch();
  std::string root = g.out_root;
  if (root.empty()) {
    const char* env = std::getenv("NNBENCH_OUT");
    root = env && *env ? env : "out";
  }
  c.dir = fs::path(root) / (g.run_id.empty() ? run_id_for(c.epoch) : safe_file_name(g.run_id));
  return c;
}

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

// Runs fn(i) for i in [0, n) on `jobs` threads. Only used for untimed work.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---- list ------------------------------------------------------------------------

struct ListArgs {
  std::string suite = "all";
  std::vector<std::string> filters;
  bool as_json = false;
};

int cmd_list(const ListArgs& a) {
  const auto suite = parse_suite(a.suite);
  if (!suite) throw SpecError("--suite", "expected micro, macro or all");
  const auto benches = select_benchmarks(*suite, a.filters);
  if (a.as_json) {
    json rows = json::array();
    for (const auto& b : benches) {
      json r = {{"id", b.id}, {"ops", b.ops()}};
      if (b.layer) {
        r["kind"] = to_string(b.layer->kind);
        r["spec"] = to_json(*b.layer);
      } else {
        r["layers"] = b.network->layers.size();
        r["variant"] = to_string(b.network->variant);
        r["executable"] = b.network->executable;
      }
      rows.push_back(std::move(r));
    }
    std::cout << json{{"registry_version", kRegistryVersion}, {"benchmarks", rows}}.dump(2) << '\n';
    return kOk;
  }
  for (auto k : kAllKinds) {
    for (const auto& m : config_table(k)) {
      const std::string id = micro_id(k, m.cls.label);
      if (std::none_of(benches.begin(), benches.end(), [&](const Benchmark& b) { return b.id == id; })) continue;
      std::printf("%-14s %-14s ops=%-12.4g %s\n", id.c_str(), std::string(to_string(m.cls.category)).c_str(),
                  static_cast<double>(analytic_counts(m.spec).ops), m.source.c_str());
    }
  }
  for (const auto& b : benches) {
    if (!b.network) continue;
    std::printf("%-24s layers=%-4zu ops=%-12.4g %s\n", b.id.c_str(), b.network->layers.size(),
                static_cast<double>(b.ops()), b.network->executable ? "executable" : "analytic-only");
  }
  return kOk;
}

// ---- characterize ----------------------------------------------------------------

struct CharArgs {
  std::string kind;
  std::string config;
  std::string format = "csv";
  double budget = kDefaultOpsBudget;
  unsigned jobs = 1;
};

int cmd_characterize(const Context& ctx, const CharArgs& a) {
  if (a.format != "csv" && a.format != "json") throw SpecError("--format", "expected csv or json");
  if (!(a.budget >= 0)) throw SpecError("--budget", "must be >= 0");
  std::vector<LayerKind> kinds;
  if (a.kind.empty()) {
    kinds.assign(kAllKinds.begin(), kAllKinds.end());
  } else {
    const auto k = parse_kind(a.kind);
    if (!k) throw SpecError("--kind", "unknown layer kind '" + a.kind + "'");
    kinds.push_back(*k);
  }
  std::vector<MicroConfig> configs;
  for (auto k : kinds) {
    for (auto& m : config_table(k)) {
      if (!a.config.empty() && std::string(1, m.cls.label) != a.config) continue;
      configs.push_back(m);
    }
  }
  if (configs.empty()) throw SpecError("--config", "no configuration matches '" + a.config + "'");

  std::vector<CharacteristicVector> vecs(configs.size());
  parallel_for(configs.size(), a.jobs,
               [&](std::size_t i) { vecs[i] = characterize_spec(configs[i].spec, ctx.g.seed, a.budget); });

  const RunManifest m = ctx.manifest({}, a.budget);
  const fs::path out = ctx.dir / "characteristics";
  std::vector<std::pair<std::string, CharacteristicVector>> named;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    named.emplace_back(micro_id(configs[i].spec.kind, configs[i].cls.label), vecs[i]);
  }
  const auto kiviat = kiviat_normalize(named);

  if (a.format == "csv") {
    std::vector<std::string> header = {"id", "kind", "config", "category", "source"};
    for (auto& h : characteristic_csv_header()) header.push_back(h);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      std::vector<std::string> r = {named[i].first, std::string(to_string(configs[i].spec.kind)),
                                    std::string(1, configs[i].cls.label),
                                    std::string(to_string(configs[i].cls.category)), configs[i].source};
      for (auto& f : characteristic_csv_fields(vecs[i])) r.push_back(f);
      rows.push_back(std::move(r));
    }
    write_csv_report(out / "micro.csv", m, header, rows);
    announce(out / "micro.csv");

    std::vector<std::string> kh = {"id"};
    for (auto ax : kKiviatAxes) kh.emplace_back(ax);
    std::vector<std::vector<std::string>> krows;
    for (const auto& k : kiviat) {
      std::vector<std::string> r = {k.id};
      for (const auto& v : k.axes) r.push_back(format_real(v));
      krows.push_back(std::move(r));
    }
    write_csv_report(out / "kiviat.csv", m, kh, krows);
    announce(out / "kiviat.csv");
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < configs.size(); ++i) {
      rows.push_back({{"id", named[i].first},
                      {"kind", to_string(configs[i].spec.kind)},
                      {"config", std::string(1, configs[i].cls.label)},
                      {"category", to_string(configs[i].cls.category)},
                      {"source", configs[i].source},
                      {"characteristics", to_json(vecs[i])}});
    }
    write_json_report(out / "micro.json", m, {{"rows", rows}});
    announce(out / "micro.json");
    json krows = json::array();
    for (const auto& k : kiviat) {
      json axes = json::object();
      for (std::size_t j = 0; j < kKiviatAxes.size(); ++j) axes[std::string(kKiviatAxes[j])] = opt_json(k.axes[j]);
      krows.push_back({{"id", k.id}, {"axes", axes}});
    }
    write_json_report(out / "kiviat.json", m, {{"rows", krows}});
    announce(out / "kiviat.json");
  }
  return kOk;
}

// ---- run -------------------------------------------------------------------------

struct RunArgs {
  std::vector<std::string> backends = {"reference"};
  std::string suite = "micro";
  std::vector<std::string> filters;
  std::uint64_t reps = 3;
  std::uint64_t warmup = 1;
  std::optional<double> power_w;
  std::optional<double> area_mm2;
  double max_ops = 1e10;
  std::string golden_dir;
  unsigned jobs = 1;
};

bool will_execute(const Benchmark& b, const RunOptions& o) {
  if (b.network) return b.network->executable;
  return static_cast<double>(analytic_counts(*b.layer).ops) <= o.max_ops && b.resident_elements() <= o.max_elements;
}

// Fills the golden cache on `jobs` threads before any timed run.
void prefill_goldens(GoldenCache& cache, const std::vector<Benchmark>& benches, const RunOptions& o, unsigned jobs) {
  std::vector<const Benchmark*> todo;
  for (const auto& b : benches) {
    if (will_execute(b, o) && !cache.contains(b, o.seed)) todo.push_back(&b);
  }
  if (jobs <= 1 || todo.size() <= 1) return;  // computed lazily by run_benchmark
  std::vector<Tensor> out(todo.size());
  parallel_for(todo.size(), jobs, [&](std::size_t i) {
    auto ref = make_reference_backend();
    out[i] = execute(*ref, *todo[i], o.seed);
  });
  for (std::size_t i = 0; i < todo.size(); ++i) cache.put(*todo[i], o.seed, std::move(out[i]));
}

json results_body(const std::vector<RunResult>& results, bool timing) {
  json rows = json::array();
  for (const auto& r : results) rows.push_back(to_json(r, timing));
  return rows;
}

std::vector<std::string> results_csv_header() {
  return {"benchmark", "backend", "status",  "giga_ops", "wall_time", "energy",
          "mse_vs_golden", "acc", "output_digest", "note"};
}

std::vector<std::vector<std::string>> results_csv_rows(const std::vector<RunResult>& results) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) {
    const bool ran = r.status != RunStatus::skipped && !r.output.data.empty();
    char digest[17];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(ran ? tensor_digest(r.output) : 0));
    rows.push_back({r.benchmark, r.backend, std::string(to_string(r.status)), format_real(r.giga_ops),
                    r.status == RunStatus::skipped ? "null" : format_real(r.wall_time), format_real(r.energy),
                    ran ? format_real(r.mse_vs_golden) : "null", ran ? format_real(r.acc) : "null",
                    ran ? digest : "null", r.note});
  }
  return rows;
}

std::string unique_stem(const std::string& name, std::map<std::string, int>& seen) {
  std::string stem = safe_file_name(name);
  if (int n = seen[stem]++; n > 0) stem += "-" + std::to_string(n + 1);
  return stem;
}

void write_scores(const Context& ctx, const RunManifest& m, const std::string& stem, const ScoreCard& card) {
  const fs::path dir = ctx.dir / "scores";
  write_json_report(dir / (stem + ".json"), m, to_json(card));
  announce(dir / (stem + ".json"));
  write_csv_report(dir / (stem + ".csv"), m, score_csv_header(), score_csv_rows(card));
  announce(dir / (stem + ".csv"));
}

void write_comparison(const Context& ctx, const RunManifest& m, const std::string& stem, const std::string& base_stem,
                      const ComparisonTable& t) {
  const fs::path dir = ctx.dir / "scores";
  const std::string name = "comparison-" + stem + "-vs-" + base_stem;
  write_json_report(dir / (name + ".json"), m, to_json(t));
  announce(dir / (name + ".json"));
  write_csv_report(dir / (name + ".csv"), m, comparison_csv_header(), comparison_csv_rows(t));
  announce(dir / (name + ".csv"));
}

int cmd_run(const Context& ctx, const RunArgs& a) {
  const auto suite = parse_suite(a.suite);
  if (!suite) throw SpecError("--suite", "expected micro, macro or all");
  if (a.power_w && !(*a.power_w > 0)) throw SpecError("--power-model", "watts must be > 0");
  if (a.area_mm2 && !(*a.area_mm2 > 0)) throw SpecError("--area", "mm2 must be > 0");
  RunOptions opt;
  opt.repetitions = a.reps;
  opt.warmup = a.warmup;
  opt.seed = ctx.g.seed;
  opt.power_w = a.power_w;
  opt.max_ops = a.max_ops;
  if (opt.repetitions < 1) throw SpecError("--reps", "must be >= 1");
  if (opt.warmup >= opt.repetitions) throw SpecError("--warmup", "must be smaller than --reps");

  // Load every backend up front so a bad name fails before any timing.
  std::vector<std::unique_ptr<Backend>> backends;
  std::vector<BackendDescriptor> descs;
  for (const auto& name : a.backends) {
    backends.push_back(open_backend(name));
    descs.push_back(backends.back()->descriptor());
    if (a.power_w) descs.back().power_w = a.power_w;
  }
  const auto benches = select_benchmarks(*suite, a.filters);
  if (benches.empty()) throw SpecError("--filter", "selects no benchmark");

  GoldenCache cache(a.golden_dir.empty() ? std::nullopt : std::optional<fs::path>(a.golden_dir));
  opt.golden = &cache;
  prefill_goldens(cache, benches, opt, a.jobs);

  const RunManifest m = ctx.manifest(descs, opt.max_ops);
  const fs::path rdir = ctx.dir / "results";
  std::map<std::string, int> seen;
  std::vector<std::string> stems;
  std::vector<std::vector<ScoreInput>> inputs;
  bool failed = false;
  for (std::size_t i = 0; i < backends.size(); ++i) {
    auto& be = *backends[i];
    const std::string stem = unique_stem(be.descriptor().name, seen);
    std::vector<RunResult> results;
    for (const auto& b : benches) {
      results.push_back(run_benchmark(be, b, opt));
      const auto& r = results.back();
      std::fprintf(stderr, "%-22s %-12s %-7s %s\n", r.benchmark.c_str(), r.backend.c_str(),
                   std::string(to_string(r.status)).c_str(),
                   r.status == RunStatus::ok ? (format_real(r.wall_time) + " s").c_str() : r.note.c_str());
      if (r.status == RunStatus::failed) failed = true;
    }
    write_json_report(rdir / (stem + ".json"), m, {{"backend", be.descriptor().name}, {"results", results_body(results, true)}});
    announce(rdir / (stem + ".json"));
    write_json_report(rdir / (stem + ".outputs.json"), m,
                      {{"backend", be.descriptor().name}, {"results", results_body(results, false)}});
    announce(rdir / (stem + ".outputs.json"));
    write_csv_report(rdir / (stem + ".csv"), m, results_csv_header(), results_csv_rows(results));
    announce(rdir / (stem + ".csv"));

    const auto area = a.area_mm2 ? a.area_mm2 : be.descriptor().area_mm2;
    inputs.push_back(score_inputs(results, area));
    write_scores(ctx, m, stem, score_card(be.descriptor().name, inputs.back()));
    stems.push_back(stem);
  }
  for (std::size_t i = 1; i < backends.size(); ++i) {
    write_comparison(ctx, m, stems[i], stems[0],
                     comparison_table(descs[i].name, inputs[i], descs[0].name, inputs[0]));
  }
  return failed ? kBenchFailure : kOk;
}

// ---- cluster ---------------------------------------------------------------------

struct ClusterArgs {
  std::string suite = "macro";
  std::string linkage = "average";
  std::string scale = "log";
};

int cmd_cluster(const Context& ctx, const ClusterArgs& a) {
  std::vector<NetworkDescriptor> nets;
  if (a.suite == "macro") nets = macro_suite();
  else if (a.suite == "dense") nets = macro_networks();
  else throw SpecError("--suite", "expected macro or dense");
  const auto linkage = parse_linkage(a.linkage);
  if (!linkage) throw SpecError("--linkage", "expected average, complete or single");
  const auto scale = parse_feature_scale(a.scale);
  if (!scale) throw SpecError("--feature-scale", "expected log or raw");

  std::vector<FeatureVector> fv;
  for (const auto& n : nets) fv.push_back(feature_vector(n, *scale));
  const Dendrogram d = hierarchical_cluster(fv, *linkage);
  const CorrelationMatrix corr = correlation_matrix(fv);
  const DiversitySummary s = diversity_summary(d);

  const RunManifest m = ctx.manifest({}, 0.0);
  const fs::path dir = ctx.dir / "cluster";
  write_json_report(dir / "dendrogram.json", m,
                    {{"feature_scale", to_string(*scale)}, {"dendrogram", to_json(d)}});
  announce(dir / "dendrogram.json");
  write_text_report(dir / "dendrogram.nwk", m, to_newick(d) + "\n");
  announce(dir / "dendrogram.nwk");

  std::vector<std::string> fh = {"network"};
  for (auto k : kAllKinds) fh.emplace_back(to_string(k));
  std::vector<std::vector<std::string>> frows;
  for (const auto& f : fv) {
    std::vector<std::string> r = {f.name};
    for (double v : f.values) r.push_back(format_real(v));
    frows.push_back(std::move(r));
  }
  write_csv_report(dir / "features.csv", m, fh, frows);
  announce(dir / "features.csv");

  std::vector<std::string> hh = {"network"};
  for (const auto& f : fv) hh.push_back(f.name);
  std::vector<std::vector<std::string>> hrows;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    std::vector<std::string> r = {fv[i].name};
    for (std::size_t j = 0; j < fv.size(); ++j) r.push_back(format_real(corr[i][j]));
    hrows.push_back(std::move(r));
  }
  write_csv_report(dir / "heatmap.csv", m, hh, hrows);
  announce(dir / "heatmap.csv");

  write_json_report(dir / "summary.json", m,
                    {{"linkage", to_string(*linkage)}, {"feature_scale", to_string(*scale)}, {"summary", to_json(s)}});
  announce(dir / "summary.json");
  return kOk;
}

// ---- score -----------------------------------------------------------------------

struct ScoreArgs {
  std::vector<std::string> inputs;
  std::string baseline;
  std::optional<double> area_mm2;
};

struct LoadedResults {
  std::string backend;
  std::vector<ScoreInput> inputs;
  std::optional<double> area;
};

LoadedResults load_results(const fs::path& path, std::optional<double> area_override) {
  std::ifstream f(path);
  if (!f) throw SpecError("--input", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw SpecError("--input", path.string() + ": " + e.what());
  }
  if (!j.contains("backend") || !j.contains("results")) {
    throw SpecError("--input", path.string() + ": not a results report (needs backend and results)");
  }
  LoadedResults out;
  out.backend = j.at("backend").get<std::string>();
  out.area = area_override;
  if (!out.area && j.contains("manifest")) {
    for (const auto& b : j["manifest"]["backends"]) {
      if (b.value("name", "") == out.backend && b.contains("area_mm2") && !b["area_mm2"].is_null()) {
        out.area = b["area_mm2"].get<double>();
      }
    }
  }
  for (const auto& r : j.at("results")) {
    if (r.value("status", "") != "ok") continue;
    if (!r.contains("wall_time") || r["wall_time"].is_null()) {
      throw SpecError("--input", path.string() + ": " + r.value("benchmark", "?") + " has no wall_time");
    }
    ScoreInput in;
    in.benchmark = r.at("benchmark").get<std::string>();
    in.ops = r.at("giga_ops").get<double>();
    in.time = r.at("wall_time").get<double>();
    if (r.contains("energy") && !r["energy"].is_null()) in.energy = r["energy"].get<double>();
    in.acc = r.contains("acc") && !r["acc"].is_null() ? r["acc"].get<double>() : 0.0;
    in.area = out.area;
    out.inputs.push_back(std::move(in));
  }
  return out;
}

int cmd_score(const Context& ctx, const ScoreArgs& a) {
  if (a.inputs.empty()) throw SpecError("--input", "at least one results file is required");
  std::vector<LoadedResults> all;
  for (const auto& p : a.inputs) all.push_back(load_results(p, a.area_mm2));
  std::optional<std::size_t> base;
  if (!a.baseline.empty()) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].backend == a.baseline) base = i;
    }
    if (!base) throw SpecError("--baseline", "no input has backend '" + a.baseline + "'");
  }
  const RunManifest m = ctx.manifest({}, 0.0);
  std::map<std::string, int> seen;
  std::vector<std::string> stems;
  for (const auto& r : all) {
    stems.push_back(unique_stem(r.backend, seen));
    write_scores(ctx, m, stems.back(), score_card(r.backend, r.inputs));
  }
  if (base) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (i == *base) continue;
      write_comparison(ctx, m, stems[i], stems[*base],
                       comparison_table(all[i].backend, all[i].inputs, all[*base].backend, all[*base].inputs));
    }
  }
  return kOk;
}

// ---- golden / export-specs -------------------------------------------------------

struct GoldenArgs {
  std::string dir;
  std::string suite = "all";
  std::vector<std::string> filters;
  unsigned jobs = 1;
};

int cmd_golden(const Context& ctx, const GoldenArgs& a) {
  const auto suite = parse_suite(a.suite);
  if (!suite) throw SpecError("--suite", "expected micro, macro or all");
  const RunOptions o;
  std::vector<Benchmark> todo;
  for (auto& b : select_benchmarks(*suite, a.filters)) {
    if (will_execute(b, o)) todo.push_back(std::move(b));
  }
  GoldenCache cache{fs::path(a.dir)};
  std::vector<Tensor> out(todo.size());
  parallel_for(todo.size(), a.jobs, [&](std::size_t i) {
    auto ref = make_reference_backend();
    out[i] = execute(*ref, todo[i], ctx.g.seed);
  });
  for (std::size_t i = 0; i < todo.size(); ++i) {
    cache.put(todo[i], ctx.g.seed, std::move(out[i]));
    announce(*cache.file_for(todo[i], ctx.g.seed));
  }
  return kOk;
}

int cmd_export_specs(const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& n : all_networks()) {
    const fs::path p = fs::path(dir) / (n.name + ".json");
    save_netspec(n, p);
    announce(p);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nnbench: neural-network workload benchmark suite"};
  app.require_subcommand(1);
  Global g;
  // The output location is not part of the manifest, so reruns into
  // different directories carry identical manifests.
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0) continue;
    g.argv.push_back(a);
  }
  app.add_option("--out", g.out_root, "Output root (default $NNBENCH_OUT, else ./out)");
  app.add_option("--run-id", g.run_id, "Run directory name (default: UTC timestamp)");
  app.add_option("--timestamp", g.timestamp, "Manifest time, seconds since the epoch (default SOURCE_DATE_EPOCH or now)");
  app.add_option("--seed", g.seed, "Seed for synthetic inputs and parameters")->capture_default_str();

  ListArgs la;
  auto* list = app.add_subcommand("list", "List micro configurations and networks");
  list->add_option("--suite", la.suite)->capture_default_str();
  list->add_option("--filter", la.filters, "Benchmark id or id prefix, repeatable");
  list->add_flag("--json", la.as_json);

  CharArgs ca;
  auto* chr = app.add_subcommand("characterize", "Characteristic vectors for micro configurations");
  chr->add_option("--kind", ca.kind, "Layer kind (conv, fc, poolmax, ...)");
  chr->add_option("--config", ca.config, "Configuration label A-G");
  chr->add_option("--format", ca.format, "csv or json")->capture_default_str();
  chr->add_option("--budget", ca.budget, "Trace budget in operations")->capture_default_str();
  chr->add_option("--jobs", ca.jobs, "Worker threads")->capture_default_str();

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Time benchmarks on one or more backends");
  run->add_option("--backend", ra.backends, "reference | naive | plugin:<so> | worker:<inner>, repeatable");
  run->add_option("--suite", ra.suite, "micro, macro or all")->capture_default_str();
  run->add_option("--filter", ra.filters, "Benchmark id or id prefix, repeatable");
  run->add_option("--reps", ra.reps, "Total runs per benchmark, warm-up included")->capture_default_str();
  run->add_option("--warmup", ra.warmup, "Leading runs excluded from timing")->capture_default_str();
  run->add_option("--power-model", ra.power_w, "Constant power in watts; energy = W x median time");
  run->add_option("--area", ra.area_mm2, "Silicon area in mm2 for the silicon-efficiency column");
  run->add_option("--max-ops", ra.max_ops, "Skip micro configurations above this many operations")
      ->capture_default_str();
  run->add_option("--golden-dir", ra.golden_dir, "Read and persist golden outputs here");
  run->add_option("--jobs", ra.jobs, "Threads for golden generation (timed runs stay serial)")
      ->capture_default_str();

  ClusterArgs cla;
  auto* cl = app.add_subcommand("cluster", "Cluster macro networks by per-kind operation mix");
  cl->add_option("--suite", cla.suite, "macro (dense + sparse) or dense")->capture_default_str();
  cl->add_option("--linkage", cla.linkage, "average, complete or single")->capture_default_str();
  cl->add_option("--feature-scale", cla.scale, "log or raw")->capture_default_str();

  ScoreArgs sa;
  auto* sc = app.add_subcommand("score", "Score cards and comparison tables from results reports");
  sc->add_option("--input", sa.inputs, "results/<backend>.json, repeatable")->required();
  sc->add_option("--baseline", sa.baseline, "Backend name to compare against");
  sc->add_option("--area", sa.area_mm2, "Silicon area in mm2 (overrides the backend descriptor)");

  GoldenArgs ga;
  auto* gold = app.add_subcommand("golden", "Write reference outputs as .nbgd files");
  gold->add_option("--dir", ga.dir)->required();
  gold->add_option("--suite", ga.suite)->capture_default_str();
  gold->add_option("--filter", ga.filters);
  gold->add_option("--jobs", ga.jobs)->capture_default_str();

  std::string spec_dir = "specs";
  auto* exp = app.add_subcommand("export-specs", "Write every registered network as a netspec JSON file");
  exp->add_option("--dir", spec_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const Context ctx = make_context(g);
    if (*list) return cmd_list(la);
    if (*chr) return cmd_characterize(ctx, ca);
    if (*run) return cmd_run(ctx, ra);
    if (*cl) return cmd_cluster(ctx, cla);
    if (*sc) return cmd_score(ctx, sa);
    if (*gold) return cmd_golden(ctx, ga);
    if (*exp) return cmd_export_specs(spec_dir);
  } catch (const SpecError& e) {
    std::fprintf(stderr, "nnbench: %s\n", e.what());
    return kUsage;
  } catch (const BackendError& e) {
    std::fprintf(stderr, "nnbench: backend load failed: %s\n", e.what());
    return kBackendLoad;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "nnbench: %s\n", e.what());
    return kBenchFailure;
  }
  return kUsage;
}
