#include <gtest/gtest.h>

#include <array>
#include <filesystem>
#include <random>

#include "count_oracle.hpp"
#include "nnbench/analytic.hpp"
#include "nnbench/characterize.hpp"
#include "nnbench/error.hpp"
#include "nnbench/registry.hpp"
#include "nnbench/trace.hpp"
#include "oracles.hpp"

using namespace nnbench;

namespace {

constexpr LayerKind kClosedFormKinds[] = {LayerKind::Conv, LayerKind::PoolAvg, LayerKind::PoolMax,
                                          LayerKind::FC,   LayerKind::ReLU,    LayerKind::Sigmoid,
                                          LayerKind::BN};

}  // namespace

TEST(Trace, CountsMatchClosedFormOnRandomLayers) {
  std::mt19937_64 rng(31);
  for (LayerKind k : kClosedFormKinds) {
    for (int i = 0; i < 30; ++i) {
      const auto spec = oracle::random_spec(k, rng);
      const auto p = instantiate_layer_params(spec, i);
      CountingSink sink;
      trace_layer(spec, p, random_tensor(spec.input_shape, i), sink);
      const auto want = oracle::closed_form_counts(spec, &p);
      ASSERT_TRUE(want);
      EXPECT_EQ(sink.reads() + sink.writes(), want->mem_acc) << to_string(k) << " " << i;
      EXPECT_EQ(sink.ops_count(), want->ops) << to_string(k) << " " << i;
    }
  }
}

TEST(Trace, AnalyticMatchesTraceForAllKinds) {
  std::mt19937_64 rng(47);
  for (LayerKind k : kAllKinds) {
    for (int i = 0; i < 20; ++i) {
      const auto spec = oracle::random_spec(k, rng);
      const auto p = instantiate_layer_params(spec, i);
      PoolSwitches sw;
      if (k == LayerKind::UnpoolMax) sw.index = oracle::random_switches(spec, rng);
      CountingSink sink;
      trace_layer(spec, p, random_tensor(spec.input_shape, i), sink, kDefaultOpsBudget,
                  k == LayerKind::UnpoolMax ? &sw : nullptr);
      const auto a = analytic_counts(spec, &p);
      EXPECT_EQ(sink.reads(), a.reads) << to_string(k) << " " << i;
      EXPECT_EQ(sink.writes(), a.writes) << to_string(k) << " " << i;
      EXPECT_EQ(sink.ops_count(), a.ops) << to_string(k) << " " << i;
      EXPECT_EQ(sink.branches(), a.branches) << to_string(k) << " " << i;
      EXPECT_EQ(sink.footprint(Region::input), a.in_mem) << to_string(k) << " " << i;
      EXPECT_EQ(sink.footprint(Region::output), a.out_mem) << to_string(k) << " " << i;
      EXPECT_EQ(sink.footprint(Region::weight), a.wgh_mem) << to_string(k) << " " << i;
    }
  }
}

TEST(Trace, OutputIsBitIdenticalToKernel) {
  std::mt19937_64 rng(3);
  for (LayerKind k : kAllKinds) {
    if (k == LayerKind::UnpoolMax) continue;
    const auto spec = oracle::random_spec(k, rng);
    const auto p = instantiate_layer_params(spec, 1);
    const Tensor x = random_tensor(spec.input_shape, 2);
    const auto traced = record_trace(spec, p, x);
    EXPECT_EQ(traced.output.output.data, forward_layer(spec, p, x).output.data) << to_string(k);
  }
}

TEST(Trace, BudgetIsEnforced) {
  const auto cfg = micro_config(LayerKind::Conv, 'F');
  const auto p = LayerParams{};
  CountingSink sink;
  EXPECT_THROW(trace_layer(cfg.spec, p, Tensor{}, sink), BudgetError);
}

TEST(Trace, ReluTraceShape) {
  LayerSpec s;
  s.kind = LayerKind::ReLU;
  s.input_shape = TensorShape{4};
  s.hyper = NoParams{};
  const Tensor x({4}, {1.0f, -1.0f, 2.0f, -3.0f});
  const auto t = record_trace(s, {}, x).trace;
  ASSERT_EQ(t.events.size(), 12u);
  EXPECT_EQ(t.events[0].type, TraceEvent::Type::read);
  EXPECT_EQ(t.events[1].type, TraceEvent::Type::branch);
  EXPECT_EQ(t.events[1].site, BranchSite::ReluSign);
  EXPECT_EQ(t.events[2].type, TraceEvent::Type::write);
  EXPECT_EQ(t.events[2].tensor, 1u);
  EXPECT_EQ(t.op_count, 4u);
}

TEST(Predictor, TwoBitCounterByHand) {
  // state starts at 2 (weakly taken): T hits, N miss (->1), N hit (->0), T miss (->1), T miss (->2), T hit
  const bool seq[] = {true, false, false, true, true, true};
  const auto r = simulate_predictor(std::span<const bool>(seq));
  EXPECT_EQ(r.branches, 6u);
  EXPECT_EQ(r.mispredictions, 3u);
  EXPECT_DOUBLE_EQ(r.mpr, 0.5);
}

TEST(Predictor, ConstantStreamsAndAlternation) {
  std::array<bool, 1000> taken;
  taken.fill(true);
  EXPECT_EQ(simulate_predictor(taken).mispredictions, 0u);
  std::array<bool, 1000> not_taken{};
  EXPECT_EQ(simulate_predictor(not_taken).mispredictions, 1u);
  std::array<bool, 1000> alt{};
  for (std::size_t i = 0; i < alt.size(); i += 2) alt[i] = true;
  // 2 -T-> 3 -N-> 2 -T-> 3 ...: every not-taken misses
  EXPECT_EQ(simulate_predictor(alt).mispredictions, 500u);
}

TEST(Predictor, NoBranchesMeansZeroMpr) {
  const auto r = simulate_predictor(std::span<const bool>());
  EXPECT_EQ(r.mpr, 0.0);
}

TEST(Trace, DumpRoundTrip) {
  std::mt19937_64 rng(8);
  const auto spec = oracle::random_spec(LayerKind::PoolMax, rng);
  const Tensor x = random_tensor(spec.input_shape, 4);
  const auto path = std::filesystem::temp_directory_path() / "nnbench_trace_roundtrip.nbtr";
  {
    DumpSink dump(path);
    trace_layer(spec, {}, x, dump);
  }
  const Trace back = read_trace_dump(path);
  EXPECT_EQ(back, record_trace(spec, {}, x).trace);
  std::filesystem::remove(path);
}

TEST(Characterize, AnalyticFallbackForExtremeConfigs) {
  const auto v = characterize_spec(micro_config(LayerKind::Conv, 'F').spec, 42);
  EXPECT_FALSE(v.traced);
  EXPECT_FALSE(v.redist_avg);
  EXPECT_FALSE(v.mpr);
  EXPECT_GT(v.ops, 0u);
}

TEST(Characterize, TracedVectorFields) {
  const auto v = characterize_spec(micro_config(LayerKind::ReLU, 'D').spec, 42);
  ASSERT_TRUE(v.traced);
  EXPECT_EQ(v.com_ptt, ComPtt::EW);
  ASSERT_TRUE(v.op_mem);
  EXPECT_DOUBLE_EQ(*v.op_mem, 0.5);
  EXPECT_EQ(characteristic_csv_fields(v).size(), characteristic_csv_header().size());
}
