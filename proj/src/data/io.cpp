#include "antix/data/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace antix::data {

std::string format_number(Scalar x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string container_digest(const nlohmann::json& meta, const std::vector<std::string>& rows) {
  std::uint64_t h = 14695981039346656037ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
  };
  nlohmann::json m = meta;
  m.erase("digest");
  feed(m.dump());
  for (const auto& r : rows) feed(r);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_container(const std::filesystem::path& path, nlohmann::json meta,
                     const std::vector<std::string>& rows) {
  meta["count"] = rows.size();
  meta["digest"] = container_digest(meta, rows);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << meta.dump() << '\n';
  for (const auto& r : rows) out << r << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  const std::string where = path.string() + ":";
  std::string line;
  if (!std::getline(in, line)) throw ParseError(where + "1: empty file");
  Container c;
  try {
    c.meta = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + "1: malformed meta line: " + e.what());
  }
  if (!c.meta.is_object() || !c.meta.contains("count") || !c.meta["count"].is_number_unsigned())
    throw ParseError(where + "1: meta must be an object with an unsigned 'count'");
  const auto count = c.meta["count"].get<std::size_t>();
  c.rows.reserve(count);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (in.eof()) throw ParseError(where + std::to_string(lineno) + ": truncated line (missing LF)");
    if (c.rows.size() == count) throw ParseError(where + std::to_string(lineno) + ": more rows than count=" + std::to_string(count));
    c.rows.push_back(line);
  }
  if (c.rows.size() != count)
    throw ParseError(where + std::to_string(lineno + 1) + ": truncated file, expected " +
                     std::to_string(count) + " rows, found " + std::to_string(c.rows.size()));
  if (!c.meta.contains("digest") || !c.meta["digest"].is_string())
    throw ParseError(where + "1: meta has no digest");
  if (c.meta["digest"].get<std::string>() != container_digest(c.meta, c.rows))
    throw ValidationError(where + " digest mismatch: file was modified after it was written");
  return c;
}

nlohmann::json parse_row(const std::string& row, std::size_t line) {
  try {
    auto j = nlohmann::json::parse(row);
    if (!j.is_array()) throw ParseError("line " + std::to_string(line) + ": expected a JSON array");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }
}

std::string transition_row(const Transition& t) {
  std::string out = "[";
  auto put = [&out](Scalar x) {
    if (out.size() > 1) out += ',';
    out += format_number(x);
  };
  for (Index i = 0; i < t.s.size(); ++i) put(t.s(i));
  for (Index i = 0; i < t.a.size(); ++i) put(t.a(i));
  put(t.r);
  for (Index i = 0; i < t.s_next.size(); ++i) put(t.s_next(i));
  out += t.done ? ",true]" : ",false]";
  return out;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  nlohmann::json meta;
  meta["kind"] = "dataset";
  meta["version"] = ds.meta().version;
  meta["name"] = ds.meta().name;
  meta["s_dim"] = ds.s_dim();
  meta["a_dim"] = ds.a_dim();
  meta["seed"] = ds.meta().seed;
  meta["generator"] = ds.meta().generator;
  std::vector<std::string> rows;
  rows.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) rows.push_back(transition_row(ds.at(i)));
  write_container(path, std::move(meta), rows);
}

Dataset load_dataset(const std::filesystem::path& path) {
  Container c = read_container(path);
  DatasetMeta meta;
  try {
    if (c.meta.value("kind", "dataset") != "dataset") throw ParseError("not a dataset file");
    meta.version = c.meta.at("version").get<int>();
    meta.name = c.meta.at("name").get<std::string>();
    meta.s_dim = c.meta.at("s_dim").get<Index>();
    meta.a_dim = c.meta.at("a_dim").get<Index>();
    meta.seed = c.meta.at("seed").get<std::uint64_t>();
    meta.generator = c.meta.at("generator").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ":1: bad dataset meta: " + e.what());
  }
  if (meta.version != 1) throw ValidationError("unsupported dataset version " + std::to_string(meta.version));
  Dataset ds(meta);
  ds.reserve(c.rows.size());
  const std::size_t width = static_cast<std::size_t>(2 * meta.s_dim + meta.a_dim + 2);
  for (std::size_t k = 0; k < c.rows.size(); ++k) {
    const std::size_t line = k + 2;
    const auto row = parse_row(c.rows[k], line);
    if (row.size() != width)
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": row has " +
                            std::to_string(row.size()) + " entries, meta implies " + std::to_string(width));
    Transition t{RowVector(meta.s_dim), RowVector(meta.a_dim), 0, RowVector(meta.s_dim), false};
    try {
      std::size_t j = 0;
      for (Index i = 0; i < meta.s_dim; ++i) t.s(i) = row[j++].get<Scalar>();
      for (Index i = 0; i < meta.a_dim; ++i) t.a(i) = row[j++].get<Scalar>();
      t.r = row[j++].get<Scalar>();
      for (Index i = 0; i < meta.s_dim; ++i) t.s_next(i) = row[j++].get<Scalar>();
      t.done = row[j].get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    try {
      ds.push_back(t);
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  }
  return ds;
}

}  // namespace antix::data
