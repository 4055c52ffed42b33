#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nnbench/analytic.hpp"
#include "nnbench/error.hpp"
#include "nnbench/network.hpp"
#include "nnbench/registry.hpp"

using namespace nnbench;

TEST(Registry, SevenConfigsPerKind) {
  for (LayerKind k : kAllKinds) {
    const auto t = config_table(k);
    ASSERT_EQ(t.size(), 7u) << to_string(k);
    int d = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(t[i].cls.label, 'A' + static_cast<char>(i));
      EXPECT_EQ(t[i].spec.kind, k);
      EXPECT_NO_THROW(validate(t[i].spec));
      d += t[i].cls.category == ConfigCategory::extreme_small;
      const bool large = i >= 4;
      EXPECT_EQ(t[i].cls.category == ConfigCategory::extreme_large, large);
    }
    EXPECT_EQ(d, 1) << to_string(k);
  }
}

TEST(Registry, NormalConfigsComeFromShippedNetworks) {
  for (LayerKind k : kAllKinds) {
    for (const auto& c : config_table(k)) {
      if (c.cls.category != ConfigCategory::normal) continue;
      const auto slash = c.source.find('/');
      ASSERT_NE(slash, std::string::npos) << micro_id(k, c.cls.label);
      const auto net = find_network(c.source.substr(0, slash));
      bool found = false;
      for (const auto& l : net.layers) {
        // no shipped network unpools by averaging; those configs take the max-unpool geometry
        LayerSpec want = c.spec;
        if (k == LayerKind::UnpoolAvg) want.kind = LayerKind::UnpoolMax;
        found |= same_workload(l, want);
      }
      EXPECT_TRUE(found) << micro_id(k, c.cls.label) << " from " << c.source;
    }
  }
}

TEST(Registry, ConvBIsVggSecondConvolution) {
  const auto vgg = vgg16();
  int convs = 0;
  const LayerSpec* second = nullptr;
  for (const auto& l : vgg.layers) {
    if (l.kind == LayerKind::Conv && ++convs == 2) {
      second = &l;
      break;
    }
  }
  ASSERT_TRUE(second);
  EXPECT_TRUE(same_workload(micro_config(LayerKind::Conv, 'B').spec, *second));
}

TEST(Registry, UnknownKindIsNamed) {
  try {
    config_table("bogus_kind");
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus_kind"), std::string::npos);
  }
}

TEST(Registry, ElevenMacroNetworksValidate) {
  const auto nets = macro_networks();
  ASSERT_EQ(nets.size(), 11u);
  std::set<std::string> names;
  for (const auto& n : nets) {
    EXPECT_NO_THROW(validate_network(n)) << n.name;
    names.insert(n.name);
  }
  EXPECT_EQ(names.size(), 11u);
  EXPECT_EQ(macro_suite().size(), 14u);
}

TEST(Netspec, RoundTripEveryShippedNetwork) {
  for (const auto& n : all_networks()) {
    const auto back = network_from_json(nlohmann::json::parse(netspec_text(n)));
    EXPECT_EQ(back, n) << n.name;
  }
  const auto path = std::filesystem::temp_directory_path() / "nnbench_lenet_roundtrip.json";
  save_netspec(lenet5(), path);
  EXPECT_EQ(load_netspec(path), lenet5());
  std::filesystem::remove(path);
}

TEST(Netspec, ShippedFilesMatchBuilders) {
  const std::filesystem::path dir = std::filesystem::path(NNBENCH_SOURCE_DIR) / "specs";
  for (const auto& n : all_networks()) {
    std::ifstream in(dir / (n.name + ".json"), std::ios::binary);
    ASSERT_TRUE(in) << n.name;
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), netspec_text(n)) << n.name;
  }
}

TEST(Netspec, ZeroOutputChannelsPointsAtField) {
  auto j = nlohmann::json::parse(netspec_text(lenet5()));
  j["layers"][0]["hyperparams"]["out_channels"] = 0;
  try {
    network_from_json(j);
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_NE(e.path().find("layers[0]"), std::string::npos) << e.path();
    EXPECT_NE(e.path().find("out_channels"), std::string::npos) << e.path();
  }
}

TEST(Netspec, IncompatibleChainNamesBothLayers) {
  auto net = lenet5();
  net.layers[1].input_shape = TensorShape{1, 7, 3, 3};
  try {
    validate_network(net);
    FAIL();
  } catch (const SpecError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(net.layers[0].name), std::string::npos) << msg;
    EXPECT_NE(msg.find(net.layers[1].name), std::string::npos) << msg;
  }
}

TEST(Layer, ShapeRules) {
  EXPECT_EQ(conv_out_extent(224, 3, 1, 1), 224u);
  EXPECT_EQ(conv_out_extent(227, 11, 4, 0), 55u);
  EXPECT_EQ(deconv_out_extent(7, 4, 2, 1), 14u);
  LayerSpec s;
  s.kind = LayerKind::UnpoolAvg;
  s.input_shape = TensorShape{1, 2, 3, 4};
  s.hyper = PoolParams{};
  EXPECT_EQ(output_shape(s), (TensorShape{1, 2, 6, 8}));
  s.hyper = PoolParams{2, 2, 1, 1, 0, 0};
  EXPECT_THROW(validate(s), SpecError);
}

TEST(Layer, KindNamesRoundTrip) {
  for (LayerKind k : kAllKinds) EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_EQ(parse_kind("CONV"), LayerKind::Conv);
  EXPECT_FALSE(parse_kind("nope"));
}

TEST(Analytic, Fc4x3Counts) {
  LayerSpec s;
  s.kind = LayerKind::FC;
  s.input_shape = TensorShape{1, 4};
  s.hyper = FCParams{3};
  const auto c = analytic_counts(s);
  EXPECT_EQ(c.ops, 24u);
  EXPECT_EQ(c.writes, 3u);
  EXPECT_EQ(c.wgh_mem, 15u);
}
