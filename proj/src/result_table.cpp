// SPDX-License-Identifier: MIT
#include "robustfolio/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robustfolio/errors.hpp"

namespace robustfolio {

void ResultTable::add_row(std::vector<double> row, std::string label) {
  if (row.size() != columns.size()) throw NumericalError("ResultTable: row width differs from header");
  if (!label.empty() && labels.size() != rows.size()) throw NumericalError("ResultTable: mixed labelled rows");
  if (label.empty() && !labels.empty()) throw NumericalError("ResultTable: mixed labelled rows");
  rows.push_back(std::move(row));
  if (!label.empty()) labels.push_back(std::move(label));
}

std::size_t ResultTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ConfigError("ResultTable: no column '" + name + "'");
}

std::vector<double> ResultTable::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ConfigError("table: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string to_csv(const ResultTable& t) {
  const bool labelled = !t.labels.empty();
  std::string out;
  if (labelled) out += "label";
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c > 0 || labelled) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (labelled) out += t.labels[r];
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      if (c > 0 || labelled) out += ',';
      out += format_real(t.rows[r][c]);
    }
    out += '\n';
  }
  for (const auto& [k, v] : t.provenance) out += "# " + k + "=" + v + "\n";
  return out;
}

std::string to_json(const ResultTable& t) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["columns"] = t.columns;
  ordered_json data = ordered_json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    ordered_json col = ordered_json::array();
    for (const auto& r : t.rows) {
      const double v = r[c];
      if (std::isfinite(v)) col.push_back(v);
      else col.push_back(format_real(v));
    }
    data[t.columns[c]] = col;
  }
  doc["data"] = data;
  if (!t.labels.empty()) doc["labels"] = t.labels;
  doc["provenance"] = t.provenance;
  return doc.dump(2) + "\n";
}

ResultTable from_csv(const std::string& text) {
  ResultTable t;
  std::stringstream ss(text);
  std::string line;
  bool header = true, labelled = false;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos && line.size() > 2) t.provenance[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    std::vector<std::string> cells = split(line);
    if (header) {
      labelled = !cells.empty() && cells[0] == "label";
      t.columns.assign(cells.begin() + (labelled ? 1 : 0), cells.end());
      header = false;
      continue;
    }
    std::string label;
    if (labelled) {
      label = cells.empty() ? std::string() : cells[0];
      cells.erase(cells.begin());
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_real(c));
    if (row.size() != t.columns.size()) throw ConfigError("table: ragged CSV row");
    t.rows.push_back(std::move(row));
    if (labelled) t.labels.push_back(label);
  }
  return t;
}

ResultTable from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  ResultTable t;
  t.columns = doc.at("columns").get<std::vector<std::string>>();
  std::size_t n = 0;
  if (!t.columns.empty()) n = doc.at("data").at(t.columns[0]).size();
  t.rows.assign(n, std::vector<double>(t.columns.size()));
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    const auto& col = doc.at("data").at(t.columns[c]);
    if (col.size() != n) throw ConfigError("table: ragged JSON columns");
    for (std::size_t r = 0; r < n; ++r) {
      t.rows[r][c] = col[r].is_string() ? parse_real(col[r].get<std::string>()) : col[r].get<double>();
    }
  }
  if (doc.contains("labels")) t.labels = doc["labels"].get<std::vector<std::string>>();
  if (doc.contains("provenance")) t.provenance = doc["provenance"].get<std::map<std::string, std::string>>();
  return t;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace robustfolio
