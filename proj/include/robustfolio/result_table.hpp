// SPDX-License-Identifier: MIT
/**
 * @file result_table.hpp
 * @brief Rectangular table of reals with CSV and JSON emitters.
 */
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace robustfolio {

inline constexpr const char* kVersion = "1.0.0";

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Optional text key per row (emitted as a leading "label" column).
  std::vector<std::string> labels;
  std::map<std::string, std::string> provenance;

  void add_row(std::vector<double> row, std::string label = {});
  /// Index of a column; throws ConfigError if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Header, one line per row, '%.17g' reals, then "# key=value" footer lines.
std::string to_csv(const ResultTable& t);
/// {"columns": [...], "data": {name: [...]}, "labels": [...], "provenance": {...}};
/// non-finite values are written as the strings "nan", "inf", "-inf".
std::string to_json(const ResultTable& t);

ResultTable from_csv(const std::string& text);
ResultTable from_json(const std::string& text);

/// Writes atomically enough for our purposes: the file is opened only after
/// the content is ready. Throws IoError when the path is not writable.
void write_file(const std::string& path, const std::string& content);

}  // namespace robustfolio
