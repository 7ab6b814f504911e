#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace carve {

using Cell = std::variant<std::int64_t, double, std::string>;

// Column-ordered table; every emitted report goes through this type.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;
};

enum class ReportFormat { csv, json };

// 12 significant digits; an integral double keeps a trailing ".0".
std::string format_double(double v);
// The double that format_double(v) reads back as.
double round12(double v);

std::string to_csv(const Table& t);
std::string to_json(const Table& t);
Table parse_csv(const std::string& text);
Table parse_json(const std::string& text);

// Throws IoError for an empty table or an unwritable path.
void emit_report(const Table& t, ReportFormat format, const std::filesystem::path& out);
Table read_report(const std::filesystem::path& in, ReportFormat format);

}  // namespace carve
