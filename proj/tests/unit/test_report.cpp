#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nnbench/csv.hpp"
#include "nnbench/report.hpp"

using namespace nnbench;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Csv, Escaping) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"x", "y"});
  w.row({"1", "line\nbreak"});
  EXPECT_EQ(os.str(), "x,y\r\n1,\"line\nbreak\"\r\n");
}

TEST(Csv, RealFormatting) {
  EXPECT_EQ(format_real(std::nullopt), "null");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Report, Timestamps) {
  EXPECT_EQ(iso_timestamp(0), "1970-01-01T00:00:00Z");
  EXPECT_EQ(iso_timestamp(1700000000), "2023-11-14T22:13:20Z");
  EXPECT_EQ(run_id_for(1700000000), "20231114T221320Z");
}

TEST(Report, SourceDateEpoch) {
  ::setenv("SOURCE_DATE_EPOCH", "1234", 1);
  EXPECT_EQ(manifest_epoch(), 1234);
  ::unsetenv("SOURCE_DATE_EPOCH");
}

TEST(Report, SafeFileName) { EXPECT_EQ(safe_file_name("plugin:/a/b.so"), "plugin__a_b.so"); }

TEST(Report, JsonAndCsvWriters) {
  const auto dir = std::filesystem::temp_directory_path() / "nnbench_report_test";
  std::filesystem::remove_all(dir);
  RunManifest m;
  m.tool_version = "t";
  m.registry_version = "1";
  m.timestamp = iso_timestamp(0);
  m.command = {"run", "--seed", "1"};
  write_json_report(dir / "a.json", m, {{"k", 1}});
  const auto j = nlohmann::json::parse(slurp(dir / "a.json"));
  EXPECT_EQ(j["k"], 1);
  EXPECT_EQ(j["manifest"]["seed"], 42);
  EXPECT_EQ(j["manifest"]["command"][1], "--seed");
  EXPECT_EQ(slurp(dir / "a.json").back(), '\n');
  write_csv_report(dir / "sub" / "b.csv", m, {"h"}, {{"v"}});
  EXPECT_EQ(slurp(dir / "sub" / "b.csv"), "h\r\nv\r\n");
  EXPECT_TRUE(std::filesystem::exists(dir / "sub" / "manifest.json"));
  std::filesystem::remove_all(dir);
}
