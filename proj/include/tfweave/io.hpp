#pragma once

// Key-value configuration files, result records, and their JSON/CSV output.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfweave/signals.hpp"

namespace tfweave {

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// `key = value` per line; `#` starts a comment; blank lines are ignored.
inline ConfigMap parse_config(std::istream& in) {
  ConfigMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw Error("config line " + std::to_string(lineno) + ": empty key or value");
    if (!out.emplace(key, value).second) throw Error("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return out;
}

inline ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse_config(in);
}

/// 17 significant digits: enough to read back the identical double.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_number(const std::string& s, const std::string& what) {
  const std::string t = detail::trim(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || (errno == ERANGE && std::isinf(v))) throw Error("invalid number for " + what + ": '" + s + "'");
  return v;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != columns.size()) throw Error("table row width does not match its header");
    rows.push_back(std::move(row));
  }
};

struct ResultRecord {
  std::string experiment;
  ConfigMap inputs;                        // echo of the effective configuration
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> labels;  // non-numeric outputs (verdicts, classifications)
  std::map<std::string, Table> tables;     // written as CSV sidecars
  std::vector<std::string> failed_checks;

  bool checks_passed() const { return failed_checks.empty(); }
  void check(bool ok, const std::string& name) {
    if (!ok) failed_checks.push_back(name);
  }
};

inline std::string sidecar_name(const ResultRecord& r, const std::string& table) { return r.experiment + "_" + table + ".csv"; }

/// Keys come out sorted, so equal records serialize to equal bytes.
inline nlohmann::json to_json(const ResultRecord& r) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["inputs"] = r.inputs;
  j["labels"] = r.labels;
  nlohmann::json scalars = nlohmann::json::object();
  for (const auto& [k, v] : r.scalars) {
    if (std::isfinite(v)) scalars[k] = v;
    else scalars[k] = format_number(v);  // JSON has no inf/nan
  }
  j["scalars"] = scalars;
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& [name, t] : r.tables) {
    tables[name] = {{"file", sidecar_name(r, name)}, {"columns", t.columns}, {"rows", t.rows.size()}};
  }
  j["tables"] = tables;
  j["checks_passed"] = r.checks_passed();
  j["failed_checks"] = r.failed_checks;
  return j;
}

inline void write_csv(const Table& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV '" + path.string() + "'");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_number(cell, path.string()));
    t.add(std::move(row));
  }
  return t;
}

/// Writes <experiment>.json and one CSV per table into dir; returns the JSON path.
inline std::filesystem::path write_result(const ResultRecord& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, t] : r.tables) write_csv(t, dir / sidecar_name(r, name));
  const auto path = dir / (r.experiment + ".json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << to_json(r).dump(2) << '\n';
  return path;
}

}  // namespace tfweave
