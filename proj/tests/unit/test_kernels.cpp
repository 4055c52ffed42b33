#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nnbench/error.hpp"
#include "nnbench/kernels.hpp"
#include "oracles.hpp"

using namespace nnbench;

namespace nnbench {
// Readable test names in ctest listings.
void PrintTo(LayerKind k, std::ostream* os) { *os << to_string(k); }
}  // namespace nnbench

namespace {

constexpr int kInstances = 100;

class KernelVsOracle : public ::testing::TestWithParam<LayerKind> {};

TEST_P(KernelVsOracle, RandomInstances) {
  const LayerKind kind = GetParam();
  std::mt19937_64 rng(0xC0FFEE ^ kind_index(kind));
  for (int i = 0; i < kInstances; ++i) {
    const LayerSpec spec = oracle::random_spec(kind, rng);
    const auto params = instantiate_layer_params(spec, 1000 + i);
    const Tensor x = random_tensor(spec.input_shape, rng());
    std::vector<std::uint64_t> sw;
    PoolSwitches ps;
    if (kind == LayerKind::UnpoolMax) {
      sw = oracle::random_switches(spec, rng);
      ps.index = sw;
    }
    const auto got = forward_layer(spec, params, x, kind == LayerKind::UnpoolMax ? &ps : nullptr);
    const auto want = oracle::forward(spec, params, x, kind == LayerKind::UnpoolMax ? &sw : nullptr);
    ASSERT_EQ(got.output.shape, output_shape(spec)) << "instance " << i;
    const auto bad = oracle::compare(got.output, want.y);
    ASSERT_FALSE(bad) << to_string(kind) << " instance " << i << " index " << bad->index << ": got " << bad->got
                      << " want " << bad->want;
    if (kind == LayerKind::PoolMax) {
      ASSERT_TRUE(got.switches);
      EXPECT_EQ(got.switches->index, want.switches) << "instance " << i;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, KernelVsOracle, ::testing::ValuesIn(kAllKinds),
                         [](const auto& info) { return std::string(to_string(info.param)); });

LayerSpec make(LayerKind k, TensorShape in, Hyperparams h) {
  LayerSpec s;
  s.name = "t";
  s.kind = k;
  s.input_shape = std::move(in);
  s.hyper = std::move(h);
  return s;
}

}  // namespace

TEST(Kernels, ConvHandExample) {
  // 1x1x3x3 input, 2x2 all-ones kernel, bias 0.5
  const auto spec = make(LayerKind::Conv, {1, 1, 3, 3}, ConvParams{1, 2, 2, 1, 1, 0, 0});
  LayerParams p = instantiate_layer_params(spec, 1);
  for (auto& v : p.tensors[0].value.data) v = 1.0f;
  p.tensors[1].value.data = {0.5f};
  Tensor x({1, 1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Tensor y = forward_conv(x, p, spec);
  EXPECT_EQ(y.data, (std::vector<float>{12.5f, 16.5f, 24.5f, 28.5f}));
}

TEST(Kernels, PoolMaxTieTakesFirst) {
  const auto spec = make(LayerKind::PoolMax, {1, 1, 2, 2}, PoolParams{});
  Tensor x({1, 1, 2, 2}, {3, 3, 1, 3});
  const auto out = forward_pool(x, spec);
  EXPECT_EQ(out.output.data, std::vector<float>{3});
  EXPECT_EQ(out.switches->index, std::vector<std::uint64_t>{0});
}

TEST(Kernels, PoolAvgPaddingDividesByValidCount) {
  const auto spec = make(LayerKind::PoolAvg, {1, 1, 2, 2}, PoolParams{2, 2, 2, 2, 1, 1});
  Tensor x({1, 1, 2, 2}, {1, 2, 3, 4});
  const auto out = forward_pool(x, spec);
  EXPECT_EQ(out.output.data, (std::vector<float>{1, 2, 3, 4}));
}

TEST(Kernels, UnpoolMaxRoundTripsPoolMax) {
  auto pool = make(LayerKind::PoolMax, {2, 3, 6, 8}, PoolParams{});
  auto unpool = make(LayerKind::UnpoolMax, {2, 3, 3, 4}, PoolParams{});
  const Tensor x = random_tensor(pool.input_shape, 5);
  const auto pooled = forward_pool(x, pool);
  const Tensor back = forward_unpool(pooled.output, unpool, &*pooled.switches);
  ASSERT_EQ(back.shape, x.shape);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (back[i] != 0.0f) {
      EXPECT_EQ(back[i], x[i]);
      ++kept;
    }
  }
  EXPECT_EQ(kept, pooled.output.size());
}

TEST(Kernels, UnpoolMaxWithoutSwitchesThrows) {
  auto unpool = make(LayerKind::UnpoolMax, {1, 1, 2, 2}, PoolParams{});
  EXPECT_THROW(forward_layer(unpool, {}, random_tensor(unpool.input_shape, 1)), Error);
}

TEST(Kernels, ReluAndSigmoidValues) {
  Tensor x({4}, {-2.0f, -0.0f, 0.0f, 3.0f});
  EXPECT_EQ(forward_activation(x, LayerKind::ReLU).data, (std::vector<float>{0, 0, 0, 3}));
  const Tensor s = forward_activation(Tensor({1}, {0.0f}), LayerKind::Sigmoid);
  EXPECT_EQ(s[0], 0.5f);
}

TEST(Kernels, BnNormalizesEachChannel) {
  const auto spec = make(LayerKind::BN, {4, 3, 5, 5}, BNParams{});
  const auto p = instantiate_layer_params(spec, 3);
  const Tensor y = forward_bn(random_tensor(spec.input_shape, 9), p, spec);
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0, sq = 0;
    for (std::size_t n = 0; n < 4; ++n)
      for (std::size_t i = 0; i < 25; ++i) {
        const double v = y[(n * 3 + c) * 25 + i];
        sum += v;
        sq += v * v;
      }
    EXPECT_NEAR(sum / 100, 0.0, 1e-6);
    EXPECT_NEAR(sq / 100, 1.0, 1e-4);
  }
}

TEST(Kernels, OutputsAreDeterministic) {
  std::mt19937_64 rng(7);
  for (LayerKind k : {LayerKind::Conv, LayerKind::LSTM, LayerKind::LRN}) {
    const auto spec = oracle::random_spec(k, rng);
    const auto p = instantiate_layer_params(spec, 11);
    const Tensor x = random_tensor(spec.input_shape, 12);
    EXPECT_EQ(forward_layer(spec, p, x).output.data, forward_layer(spec, p, x).output.data);
  }
}

TEST(Kernels, GoldenRoundTrip) {
  const Tensor t = random_tensor({2, 3, 4}, 77);
  const auto bytes = encode_golden(t);
  ASSERT_EQ(bytes.size(), 16 + 3 * 4 + t.size() * 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "NBGD");
  const Tensor back = decode_golden(bytes);
  EXPECT_EQ(back.shape, t.shape);
  EXPECT_EQ(back.data, t.data);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode_golden(truncated), Error);
}

TEST(Kernels, MseOfIdenticalIsZero) {
  const Tensor t = random_tensor({100}, 3);
  EXPECT_EQ(mse(t, t), 0.0);
  Tensor u = t;
  u[0] += 1.0f;
  EXPECT_NEAR(mse(t, u), 0.01, 1e-9);
}
