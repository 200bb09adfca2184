#include "antix/experiments/csv.hpp"

#include "antix/data/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace antix::experiments {

std::string CsvTable::cell(Scalar x) { return data::format_number(x); }
std::string CsvTable::cell(std::int64_t x) { return std::to_string(x); }

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size())
    throw DimensionError("csv row has " + std::to_string(row.size()) + " cells, header has " +
                         std::to_string(header.size()));
  for (const auto& c : row)
    if (c.find_first_of(",\n\"") != std::string::npos) throw ValidationError("csv cell '" + c + "' needs quoting");
  rows.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ValidationError("csv has no column '" + name + "'");
}

Scalar CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& text = rows.at(row).at(column(name));
  Scalar x = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || p != text.data() + text.size()) throw ParseError("csv cell '" + text + "' is not a number");
  return x;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  out << kCsvVersionLine << '\n';
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvVersionLine)
    throw ParseError(path.string() + ":1: missing '" + std::string(kCsvVersionLine) + "' line");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw ParseError(path.string() + ":2: missing header");
  CsvTable t(split(line));
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " cells");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CsvTable metric_table(const std::vector<sac::MetricRow>& log) {
  CsvTable t({"step", "critic_loss", "actor_loss", "beta", "mean_policy_bonus", "mean_data_bonus", "action_mse",
              "max_abs_q", "entropy"});
  t.rows.reserve(log.size());
  for (const auto& r : log)
    t.add({CsvTable::cell(r.step), CsvTable::cell(r.critic_loss), CsvTable::cell(r.actor_loss), CsvTable::cell(r.beta),
           CsvTable::cell(r.mean_policy_bonus), CsvTable::cell(r.mean_data_bonus), CsvTable::cell(r.action_mse),
           CsvTable::cell(r.max_abs_q), CsvTable::cell(r.entropy)});
  return t;
}

}  // namespace antix::experiments
