#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nnbench {

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);
std::string format_real(const std::optional<double>& v);  ///< "null" when absent

/// RFC-4180 writer: comma separated, CRLF line ends, quotes when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::string csv_escape(const std::string& field);

}  // namespace nnbench
