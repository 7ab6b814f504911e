#include "carve/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "carve/errors.hpp"
#include "json.hpp"

namespace carve {

namespace {

using ojson = nlohmann::ordered_json;

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos;
}

Cell parse_cell(const std::string& s, bool quoted);

std::string quote(const std::string& s, bool force = false) {
  if (!force && !needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  // Text that would read back as a number is quoted to keep its type.
  const auto& s = std::get<std::string>(c);
  return quote(s, !std::holds_alternative<std::string>(parse_cell(s, false)));
}

Cell parse_cell(const std::string& s, bool quoted) {
  if (quoted || s.empty()) return s;
  const char* end = s.data() + s.size();
  std::int64_t i;
  if (auto [p, ec] = std::from_chars(s.data(), end, i); ec == std::errc() && p == end) return i;
  double d;
  if (auto [p, ec] = std::from_chars(s.data(), end, d); ec == std::errc() && p == end) return d;
  return s;
}

// Splits one CSV record, honoring double-quoted fields.
std::vector<std::pair<std::string, bool>> split_record(const std::string& line) {
  std::vector<std::pair<std::string, bool>> out;
  std::string cur;
  bool in_quotes = false, quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = quoted = true;
    } else if (c == ',') {
      out.emplace_back(std::move(cur), quoted);
      cur.clear();
      quoted = false;
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.emplace_back(std::move(cur), quoted);
  return out;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return j;
  throw ConfigError("table has no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw ConfigError("column '" + name + "' is not numeric");
}

const std::string& Table::text(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  throw ConfigError("column '" + name + "' is not text");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_double(v).c_str(), nullptr);
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << quote(t.columns[j]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << cell_text(row[j]);
    os << '\n';
  }
  return os.str();
}

std::string to_json(const Table& t) {
  ojson arr = ojson::array();
  for (const auto& row : t.rows) {
    ojson obj = ojson::object();
    for (std::size_t j = 0; j < row.size(); ++j) {
      const Cell& c = row[j];
      if (const auto* i = std::get_if<std::int64_t>(&c)) {
        obj[t.columns[j]] = *i;
      } else if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) {
          obj[t.columns[j]] = round12(*d);
        } else {
          obj[t.columns[j]] = std::isnan(*d) ? ojson(nullptr) : ojson(format_double(*d));
        }
      } else {
        obj[t.columns[j]] = std::get<std::string>(c);
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(1) + "\n";
}

Table parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  if (!std::getline(in, line)) throw IoError("report: empty input");
  for (auto& [name, q] : split_record(line)) t.columns.push_back(name);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_record(line);
    if (fields.size() != t.columns.size()) throw IoError("report: ragged row");
    std::vector<Cell> row;
    for (auto& [s, q] : fields) row.push_back(parse_cell(s, q));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table parse_json(const std::string& text) {
  const ojson arr = ojson::parse(text);
  if (!arr.is_array() || arr.empty()) throw IoError("report: expected a nonempty JSON array");
  Table t;
  for (auto it = arr[0].begin(); it != arr[0].end(); ++it) t.columns.push_back(it.key());
  for (const auto& obj : arr) {
    std::vector<Cell> row;
    for (const auto& name : t.columns) {
      const ojson& v = obj.at(name);
      if (v.is_null()) {
        row.emplace_back(std::numeric_limits<double>::quiet_NaN());
      } else if (v.is_number_integer()) {
        row.emplace_back(v.get<std::int64_t>());
      } else if (v.is_number()) {
        row.emplace_back(v.get<double>());
      } else {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "-inf") {
          row.emplace_back(s == "inf" ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity());
        } else {
          row.emplace_back(s);
        }
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void emit_report(const Table& t, ReportFormat format, const std::filesystem::path& out) {
  if (t.rows.empty()) throw IoError("emit_report: no records");
  if (out.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(out.parent_path(), ec);
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("emit_report: cannot write " + out.string());
  f << (format == ReportFormat::csv ? to_csv(t) : to_json(t));
  if (!f) throw IoError("emit_report: write failed for " + out.string());
}

Table read_report(const std::filesystem::path& in, ReportFormat format) {
  std::ifstream f(in, std::ios::binary);
  if (!f) throw IoError("read_report: cannot open " + in.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return format == ReportFormat::csv ? parse_csv(ss.str()) : parse_json(ss.str());
}

}  // namespace carve
