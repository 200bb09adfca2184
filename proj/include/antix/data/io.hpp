#pragma once

#include "antix/data/dataset.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace antix::data {

/// Line-oriented container shared by dataset and checkpoint files:
/// line 1 is a JSON object (meta, including "count" and "digest"),
/// lines 2..count+1 are JSON arrays. UTF-8, LF line endings.
struct Container {
  nlohmann::json meta;
  std::vector<std::string> rows;
};

/// Formats with 17 significant digits, which round-trips any double.
std::string format_number(Scalar x);

/// FNV-1a 64 over the meta (without "digest") and every row, hex encoded.
std::string container_digest(const nlohmann::json& meta, const std::vector<std::string>& rows);

/// Sets meta["count"] and meta["digest"], then writes the file.
void write_container(const std::filesystem::path& path, nlohmann::json meta,
                     const std::vector<std::string>& rows);

/// Reads and validates line structure, count and digest. Throws ParseError
/// (with a line number) on malformed input and ValidationError on a digest
/// mismatch.
Container read_container(const std::filesystem::path& path);

/// Parses one row as a JSON array; `line` is the 1-based file line for messages.
nlohmann::json parse_row(const std::string& row, std::size_t line);

/// One transition per row: [s…, a…, r, s_next…, done].
std::string transition_row(const Transition& t);

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace antix::data
