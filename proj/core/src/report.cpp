#include "nnbench/report.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "nnbench/csv.hpp"
#include "nnbench/error.hpp"

namespace nnbench {

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json backends = nlohmann::json::array();
  for (const auto& b : m.backends) backends.push_back(to_json(b));
  return {{"tool_version", m.tool_version},
          {"registry_version", m.registry_version},
          {"seed", m.seed},
          {"backends", backends},
          {"timestamp", m.timestamp},
          {"command", m.command},
          {"ops_budget", m.ops_budget}};
}

std::int64_t manifest_epoch() {
  if (const char* s = std::getenv("SOURCE_DATE_EPOCH"); s && *s) {
    char* end = nullptr;
    const long long v = std::strtoll(s, &end, 10);
    if (*end != '\0' || v < 0) throw SpecError("SOURCE_DATE_EPOCH", "not a non-negative integer");
    return v;
  }
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace {

std::string utc(std::int64_t epoch, const char* fmt) {
  const std::time_t t = static_cast<std::time_t>(epoch);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

void write_sibling_manifest(const std::filesystem::path& path, const RunManifest& m) {
  auto f = open_out(path.parent_path() / "manifest.json");
  f << to_json(m).dump(2) << '\n';
}

}  // namespace

std::string iso_timestamp(std::int64_t epoch) { return utc(epoch, "%Y-%m-%dT%H:%M:%SZ"); }
std::string run_id_for(std::int64_t epoch) { return utc(epoch, "%Y%m%dT%H%M%SZ"); }

std::string safe_file_name(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out.empty() ? "_" : out;
}

void write_json_report(const std::filesystem::path& path, const RunManifest& m, nlohmann::json body) {
  body["manifest"] = to_json(m);
  auto f = open_out(path);
  f << body.dump(2) << '\n';
}

void write_csv_report(const std::filesystem::path& path, const RunManifest& m, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  {
    auto f = open_out(path);
    CsvWriter w(f);
    w.row(header);
    for (const auto& r : rows) w.row(r);
  }
  write_sibling_manifest(path, m);
}

void write_text_report(const std::filesystem::path& path, const RunManifest& m, const std::string& text) {
  {
    auto f = open_out(path);
    f << text;
  }
  write_sibling_manifest(path, m);
}

}  // namespace nnbench
