#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nnbench/backend.hpp"

namespace nnbench {

/// Reproducibility envelope carried by every emitted report.
struct RunManifest {
  std::string tool_version;
  std::string registry_version;
  std::uint64_t seed = 42;
  std::vector<BackendDescriptor> backends;
  std::string timestamp;             ///< ISO-8601 UTC
  std::vector<std::string> command;  ///< argv without the program path
  double ops_budget = 0.0;
};

nlohmann::json to_json(const RunManifest& m);

/// Seconds since the epoch: SOURCE_DATE_EPOCH when set, else the clock.
std::int64_t manifest_epoch();
std::string iso_timestamp(std::int64_t epoch);
/// Compact form used as the default run directory name: 20240101T000000Z.
std::string run_id_for(std::int64_t epoch);

/// Replaces characters outside [A-Za-z0-9._-] with '_'.
std::string safe_file_name(std::string_view s);

/// Pretty JSON with the manifest under "manifest", newline terminated.
void write_json_report(const std::filesystem::path& path, const RunManifest& m, nlohmann::json body);
/// RFC-4180 file plus a sibling manifest.json.
void write_csv_report(const std::filesystem::path& path, const RunManifest& m, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);
/// Plain text artifact plus a sibling manifest.json.
void write_text_report(const std::filesystem::path& path, const RunManifest& m, const std::string& text);

}  // namespace nnbench
