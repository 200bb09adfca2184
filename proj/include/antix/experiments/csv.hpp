#pragma once

#include "antix/sac/agent.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace antix::experiments {

inline constexpr const char* kCsvVersionLine = "# antix-metrics v1";

/// Header plus string cells; numbers are stored with 17 significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit CsvTable(std::vector<std::string> columns = {}) : header(std::move(columns)) {}

  /// Cell helpers for mixed rows.
  static std::string cell(Scalar x);
  static std::string cell(std::int64_t x);
  static std::string cell(const std::string& x) { return x; }

  void add(std::vector<std::string> row);
  Scalar number(std::size_t row, const std::string& column) const;
  std::size_t column(const std::string& name) const;
};

void write_csv(const CsvTable& table, const std::filesystem::path& path);
/// Requires the version line; throws ParseError otherwise.
CsvTable read_csv(const std::filesystem::path& path);

CsvTable metric_table(const std::vector<sac::MetricRow>& log);

}  // namespace antix::experiments
