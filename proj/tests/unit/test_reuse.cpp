#include <gtest/gtest.h>

#include <random>

#include "nnbench/reuse.hpp"
#include "nnbench/trace.hpp"
#include "oracles.hpp"
#include "reuse_oracle.hpp"

using namespace nnbench;

TEST(Reuse, HandExample) {
  // a b c a b b
  const std::vector<std::uint64_t> t = {0, 1, 2, 0, 1, 1};
  const auto d = reuse_distances_fast(t);
  const std::vector<std::optional<std::uint64_t>> want = {std::nullopt, std::nullopt, std::nullopt, 2, 2, 0};
  EXPECT_EQ(d, want);
  EXPECT_EQ(oracle::reuse_by_definition(t), want);
}

TEST(Reuse, BucketEdges) {
  EXPECT_EQ(reuse_bucket(0), 0u);
  EXPECT_EQ(reuse_bucket(1), 0u);
  EXPECT_EQ(reuse_bucket(2), 1u);
  EXPECT_EQ(reuse_bucket(3), 1u);
  EXPECT_EQ(reuse_bucket(4), 2u);
  EXPECT_EQ(reuse_bucket((1ULL << 30) - 1), 29u);
  EXPECT_EQ(reuse_bucket(1ULL << 30), 30u);
  EXPECT_EQ(reuse_bucket(1ULL << 50), 30u);
}

TEST(Reuse, SummaryAverageAndAbsence) {
  const std::vector<std::optional<std::uint64_t>> none = {std::nullopt, std::nullopt};
  EXPECT_FALSE(summarize_reuse(none).average);
  const std::vector<std::optional<std::uint64_t>> some = {std::nullopt, 2, 4};
  const auto s = summarize_reuse(some);
  EXPECT_EQ(s.accesses, 3u);
  EXPECT_EQ(s.reuses, 2u);
  EXPECT_DOUBLE_EQ(*s.average, 3.0);
  EXPECT_EQ(s.max_distance, 4u);
  EXPECT_EQ(s.histogram[1], 1u);
  EXPECT_EQ(s.histogram[2], 1u);
}

TEST(Reuse, ExhaustiveSmallAlphabet) {
  // every sequence of length <= 8 over 3 symbols
  for (int len = 1; len <= 8; ++len) {
    std::uint64_t total = 1;
    for (int i = 0; i < len; ++i) total *= 3;
    std::vector<std::uint64_t> seq(len);
    for (std::uint64_t code = 0; code < total; ++code) {
      std::uint64_t c = code;
      for (int i = 0; i < len; ++i, c /= 3) seq[i] = c % 3;
      ASSERT_EQ(reuse_distances_fast(seq), oracle::reuse_by_definition(seq)) << "len " << len << " code " << code;
    }
  }
}

TEST(Reuse, RandomTracesIncludingCompaction) {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 40; ++i) {
    const std::size_t len = 1 + rng() % 20000;
    const std::uint64_t keys = 1 + rng() % (i % 2 ? 8 : 2000);
    std::vector<std::uint64_t> seq(len);
    for (auto& v : seq) v = rng() % keys;
    ASSERT_EQ(reuse_distances_fast(seq), oracle::reuse_by_definition(seq)) << i;
  }
}

TEST(Reuse, LibraryNaiveAgrees) {
  std::mt19937_64 rng(5);
  std::vector<std::uint64_t> seq(3000);
  for (auto& v : seq) v = rng() % 97;
  EXPECT_EQ(reuse_distances_naive(seq), oracle::reuse_by_definition(seq));
}

TEST(Reuse, SinkMatchesAddressesOfRecordedTrace) {
  std::mt19937_64 rng(9);
  for (LayerKind k : {LayerKind::Conv, LayerKind::FC, LayerKind::PoolMax, LayerKind::LSTM}) {
    const auto spec = oracle::random_spec(k, rng);
    const auto p = instantiate_layer_params(spec, 1);
    const Tensor x = random_tensor(spec.input_shape, 2);
    ReuseSink sink(true);
    RecordingSink rec;
    TeeSink tee({&sink, &rec});
    trace_layer(spec, p, x, tee);
    const Trace t = rec.take();
    const auto addrs = trace_addresses(t);
    EXPECT_EQ(sink.distances(), oracle::reuse_by_definition(addrs)) << to_string(k);
    const auto s = sink.stats();
    EXPECT_EQ(s.accesses, t.mem_acc());
  }
}
