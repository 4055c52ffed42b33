#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "nnbench/backend.hpp"
#include "nnbench/scoring.hpp"

using namespace nnbench;

namespace {

ScoreInput in(std::string name, double ops, double time, std::optional<double> energy, std::optional<double> area) {
  ScoreInput s;
  s.benchmark = std::move(name);
  s.ops = ops;
  s.time = time;
  s.energy = energy;
  s.area = area;
  return s;
}

}  // namespace

TEST(Scoring, Primitives) {
  EXPECT_DOUBLE_EQ(gops(10.0, 2.0), 5.0);
  EXPECT_THROW(gops(1.0, 0.0), std::exception);
  EXPECT_DOUBLE_EQ(*gopj(10.0, 4.0), 2.5);
  EXPECT_FALSE(gopj(10.0, std::nullopt));
  EXPECT_DOUBLE_EQ(*silicon_eff(0.9, 0.9, 2.0), 0.5);
  EXPECT_FALSE(silicon_eff(1.0, 1.0, std::nullopt));
}

TEST(Scoring, FourNineIsSix) {
  // products 4 and 9: gopj 4 / 9, gops 1, silicon efficiency 1
  const std::vector<ScoreInput> v = {in("a", 4.0, 4.0, 1.0, 1.0), in("b", 9.0, 9.0, 1.0, 1.0)};
  const auto s = synthesized_score(v);
  ASSERT_TRUE(s.value);
  EXPECT_NEAR(*s.value, 6.0, 1e-12);
  EXPECT_TRUE(s.excluded.empty());
}

TEST(Scoring, DoublingGopjDoublesScore) {
  const std::vector<ScoreInput> v = {in("a", 3.0, 0.5, 2.0, 4.0), in("b", 7.0, 1.5, 0.3, 4.0),
                                     in("c", 1.0, 0.1, 0.9, 4.0)};
  auto halved = v;
  for (auto& x : halved) *x.energy /= 2.0;
  EXPECT_NEAR(*synthesized_score(halved).value, 2.0 * *synthesized_score(v).value, 1e-12);
}

TEST(Scoring, MissingOperandsAreExcluded) {
  const std::vector<ScoreInput> v = {in("a", 4.0, 4.0, 1.0, 1.0), in("b", 9.0, 9.0, std::nullopt, 1.0),
                                     in("c", 9.0, 9.0, 1.0, std::nullopt)};
  const auto s = synthesized_score(v);
  EXPECT_NEAR(*s.value, 4.0, 1e-12);
  EXPECT_EQ(s.excluded, (std::vector<std::string>{"b", "c"}));
  const std::vector<ScoreInput> none = {in("b", 9.0, 9.0, std::nullopt, std::nullopt)};
  EXPECT_FALSE(synthesized_score(none).value);
}

TEST(Scoring, Hooks) {
  ScalingHooks h;
  h.f = [](double x) { return std::sqrt(x); };
  const std::vector<ScoreInput> v = {in("a", 4.0, 1.0, 1.0, 1.0)};
  // sqrt(4) * 4 * 1
  EXPECT_NEAR(*synthesized_score(v, h).value, 8.0, 1e-12);
}

TEST(Scoring, GeomeanSkipsNulls) {
  const std::vector<std::optional<double>> v = {2.0, std::nullopt, 8.0};
  std::size_t used = 0;
  EXPECT_NEAR(*geomean(v, &used), 4.0, 1e-12);
  EXPECT_EQ(used, 2u);
  const std::vector<std::optional<double>> empty = {std::nullopt};
  EXPECT_FALSE(geomean(empty));
}

TEST(Scoring, SpeedupAntiSymmetryOnRealRuns) {
  auto ref = make_reference_backend();
  auto naive = make_naive_backend();
  RunOptions opt;
  opt.repetitions = 2;
  const auto benches = select_benchmarks(Suite::micro, {"conv/A", "fc/A", "pool_max/A", "relu/A"});
  const auto a = score_inputs(run_suite(*ref, benches, opt), std::nullopt);
  const auto b = score_inputs(run_suite(*naive, benches, opt), std::nullopt);
  const auto ab = comparison_table("naive", b, "reference", a);
  const auto ba = comparison_table("reference", a, "naive", b);
  ASSERT_EQ(ab.rows.size(), ba.rows.size());
  for (std::size_t i = 0; i < ab.rows.size(); ++i) {
    EXPECT_NEAR(*ab.rows[i].speedup * *ba.rows[i].speedup, 1.0, 1e-12) << ab.rows[i].benchmark;
  }
  EXPECT_NEAR(*ab.geomean_speedup * *ba.geomean_speedup, 1.0, 1e-12);
}

TEST(Scoring, ComparisonMissingBaselineIsNull) {
  const std::vector<ScoreInput> a = {in("x", 1, 1, std::nullopt, std::nullopt), in("y", 1, 2, 4.0, std::nullopt)};
  const std::vector<ScoreInput> base = {in("y", 1, 4, 2.0, std::nullopt)};
  const auto t = comparison_table("a", a, "base", base);
  EXPECT_FALSE(t.rows[0].speedup);
  EXPECT_DOUBLE_EQ(*t.rows[1].speedup, 2.0);
  EXPECT_DOUBLE_EQ(*t.rows[1].normalized_energy, 2.0);
  const auto j = to_json(t);
  EXPECT_TRUE(j["rows"][0]["speedup"].is_null());
}

TEST(Scoring, CardCsvHasGeomeanRow) {
  const std::vector<ScoreInput> v = {in("a", 4.0, 2.0, std::nullopt, std::nullopt)};
  const auto c = score_card("ref", v);
  const auto rows = score_csv_rows(c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][1], "geomean");
  EXPECT_EQ(rows[0].size(), score_csv_header().size());
  EXPECT_EQ(rows[0][5], "null");
  EXPECT_FALSE(c.efficiency_score.value);
}
