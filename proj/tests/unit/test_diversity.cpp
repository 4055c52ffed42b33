#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "nnbench/diversity.hpp"
#include "nnbench/registry.hpp"

using namespace nnbench;

namespace {

FeatureVector fv(std::string name, std::initializer_list<double> vals) {
  FeatureVector f;
  f.name = std::move(name);
  std::copy(vals.begin(), vals.end(), f.values.begin());
  return f;
}

std::vector<FeatureVector> random_vectors(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector f;
    f.name = "n" + std::to_string(i);
    for (auto& v : f.values) v = u(rng);
    out.push_back(f);
  }
  return out;
}

double pearson(const FeatureVector& a, const FeatureVector& b) {
  const double n = kFeatureSlots;
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < kFeatureSlots; ++i) {
    ma += a.values[i] / n;
    mb += b.values[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < kFeatureSlots; ++i) {
    sab += (a.values[i] - ma) * (b.values[i] - mb);
    saa += (a.values[i] - ma) * (a.values[i] - ma);
    sbb += (b.values[i] - mb) * (b.values[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(Cluster, CollinearPointsAllLinkages) {
  const std::vector<FeatureVector> v = {fv("a", {0}), fv("b", {1}), fv("c", {10})};
  const std::pair<Linkage, double> cases[] = {
      {Linkage::single, 9.0}, {Linkage::average, 9.5}, {Linkage::complete, 10.0}};
  for (const auto& [l, top] : cases) {
    const auto d = hierarchical_cluster(v, l);
    ASSERT_EQ(d.nodes.size(), 5u);
    EXPECT_DOUBLE_EQ(d.nodes[3].height, 1.0);
    EXPECT_DOUBLE_EQ(d.root().height, top) << to_string(l);
    EXPECT_EQ(d.first_merge("a").second, std::vector<std::string>{"b"});
    EXPECT_EQ(d.leaves(static_cast<int>(d.nodes.size()) - 1), (std::vector<std::string>{"a", "b", "c"}));
  }
}

TEST(Cluster, PermutationInvariant) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto v = random_vectors(rng, 9);
    const auto base = hierarchical_cluster(v);
    std::shuffle(v.begin(), v.end(), rng);
    const auto shuffled = hierarchical_cluster(v);
    EXPECT_EQ(topology(base), topology(shuffled));
    EXPECT_DOUBLE_EQ(base.root().height, shuffled.root().height);
  }
}

TEST(Cluster, ScalingScalesHeights) {
  std::mt19937_64 rng(6);
  auto v = random_vectors(rng, 8);
  const auto base = hierarchical_cluster(v, Linkage::complete);
  for (auto& f : v)
    for (auto& x : f.values) x *= 3.0;
  const auto scaled = hierarchical_cluster(v, Linkage::complete);
  EXPECT_EQ(topology(base), topology(scaled));
  for (std::size_t i = base.leaf_count; i < base.nodes.size(); ++i)
    EXPECT_NEAR(scaled.nodes[i].height, 3.0 * base.nodes[i].height, 1e-9);
}

TEST(Cluster, HeightsAreMonotoneForAverageLinkage) {
  std::mt19937_64 rng(12);
  const auto d = hierarchical_cluster(random_vectors(rng, 15));
  for (std::size_t i = d.leaf_count + 1; i < d.nodes.size(); ++i)
    EXPECT_GE(d.nodes[i].height, d.nodes[i - 1].height);
  EXPECT_EQ(d.root().size, 15u);
}

TEST(Cluster, NewickAndJson) {
  const std::vector<FeatureVector> v = {fv("a", {0}), fv("b", {1}), fv("c", {10})};
  const auto d = hierarchical_cluster(v);
  const auto nwk = to_newick(d);
  EXPECT_EQ(nwk.back(), ';');
  for (const char* n : {"a", "b", "c"}) EXPECT_NE(nwk.find(n), std::string::npos);
  const auto j = to_json(d);
  EXPECT_EQ(j.at("linkage"), "average");
}

TEST(Correlation, MatchesPearsonOracle) {
  std::mt19937_64 rng(21);
  const auto v = random_vectors(rng, 6);
  const auto m = correlation_matrix(v);
  ASSERT_EQ(m.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      ASSERT_TRUE(m[i][j]);
      EXPECT_NEAR(*m[i][j], pearson(v[i], v[j]), 1e-12);
      EXPECT_EQ(*m[i][j], *m[j][i]);
    }
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(*m[i][i], 1.0, 1e-12);
}

TEST(Correlation, ConstantVectorIsNull) {
  const std::vector<FeatureVector> v = {fv("flat", {}), fv("x", {1, 2, 3})};
  const auto m = correlation_matrix(v);
  EXPECT_FALSE(m[0][1]);
  EXPECT_FALSE(m[0][0]);
  EXPECT_TRUE(m[1][1]);
}

TEST(Features, LogScaleAndSlots) {
  const auto raw = feature_vector(lenet5(), FeatureScale::raw);
  const auto lg = feature_vector(lenet5(), FeatureScale::log);
  for (std::size_t i = 0; i < kFeatureSlots; ++i) EXPECT_NEAR(lg.values[i], std::log10(1.0 + raw.values[i]), 1e-12);
  EXPECT_GT(raw.values[kind_index(LayerKind::Conv)], 0.0);
  EXPECT_EQ(raw.values[kind_index(LayerKind::LSTM)], 0.0);
}

TEST(Kiviat, TwoPointScaling) {
  CharacteristicVector a, b;
  a.mem_acc = 1;
  b.mem_acc = 1024;
  a.ops = b.ops = 5;
  const std::vector<std::pair<std::string, CharacteristicVector>> rows = {{"a", a}, {"b", b}};
  const auto k = kiviat_normalize(rows);
  ASSERT_EQ(k.size(), 2u);
  EXPECT_DOUBLE_EQ(*k[0].axes[0], 0.0);
  EXPECT_DOUBLE_EQ(*k[1].axes[0], 1.0);
  EXPECT_DOUBLE_EQ(*k[0].axes[5], 0.0);  // ops equal on both: degenerate axis
  EXPECT_FALSE(k[0].axes[1]);             // redist absent
}

TEST(Summary, FractionAbove) {
  const std::vector<FeatureVector> v = {fv("a", {0}), fv("b", {1}), fv("c", {10})};
  const auto s = diversity_summary(hierarchical_cluster(v, Linkage::single));
  EXPECT_DOUBLE_EQ(s.geomean_height, 3.0);
  EXPECT_DOUBLE_EQ(s.max_height, 9.0);
  EXPECT_NEAR(s.fraction_above, 1.0 / 3.0, 1e-12);
}
