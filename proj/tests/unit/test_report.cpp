#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "carve/errors.hpp"
#include "carve/report.hpp"
#include "doctest.h"

using namespace carve;

namespace {

Table sample_table() {
  Table t;
  t.columns = {"name", "count", "value"};
  t.rows.push_back({std::string("plain"), std::int64_t{3}, 0.1});
  t.rows.push_back({std::string("with, comma \"q\""), std::int64_t{-7}, 1.0 / 3.0});
  t.rows.push_back({std::string("specials"), std::int64_t{0},
                    std::numeric_limits<double>::infinity()});
  t.rows.push_back({std::string("nan"), std::int64_t{1}, std::numeric_limits<double>::quiet_NaN()});
  t.rows.push_back({std::string("whole"), std::int64_t{2}, 5.0});
  return t;
}

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

void check_equal(const Table& a, const Table& b) {
  REQUIRE(a.columns == b.columns);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.text(i, "name") == b.text(i, "name"));
    CHECK(a.number(i, "count") == b.number(i, "count"));
    const double x = round12(a.number(i, "value")), y = b.number(i, "value");
    if (std::isnan(x)) {
      CHECK(std::isnan(y));
    } else {
      CHECK(x == y);
    }
  }
}

}  // namespace

TEST_CASE("doubles print at 12 significant digits") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(5.0) == "5.0");
  CHECK(format_double(1e-20) == "1e-20");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(round12(1.0 / 3.0) == 0.333333333333);
}

TEST_CASE("CSV and JSON round trips") {
  const Table t = sample_table();
  const auto dir = std::filesystem::temp_directory_path() / "carve_report_test";
  for (ReportFormat f : {ReportFormat::csv, ReportFormat::json}) {
    const auto path = dir / (f == ReportFormat::csv ? "t.csv" : "t.json");
    emit_report(t, f, path);
    check_equal(t, read_report(path, f));
  }
  CHECK(line_count(dir / "t.csv") == t.rows.size() + 1);
}

TEST_CASE("single record gives one data row under a header") {
  Table t;
  t.columns = {"a", "b"};
  t.rows.push_back({1.5, std::string("x")});
  CHECK(to_csv(t) == "a,b\n1.5,x\n");
  const Table j = parse_json(to_json(t));
  CHECK(j.columns == t.columns);
  CHECK(j.rows.size() == 1);
}

TEST_CASE("emit_report output is byte-stable") {
  const Table t = sample_table();
  CHECK(to_csv(t) == to_csv(t));
  CHECK(to_json(t) == to_json(parse_json(to_json(t))));
  CHECK(to_csv(parse_csv(to_csv(t))) == to_csv(t));
}

TEST_CASE("report errors") {
  Table empty;
  empty.columns = {"a"};
  CHECK_THROWS_AS(emit_report(empty, ReportFormat::csv, "/tmp/never.csv"), IoError);
  CHECK_THROWS_AS(emit_report(sample_table(), ReportFormat::csv, "/proc/forbidden/x.csv"),
                  IoError);
  CHECK_THROWS_AS(read_report("/nonexistent/x.csv", ReportFormat::csv), IoError);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), IoError);
  CHECK_THROWS_AS(sample_table().column("missing"), ConfigError);
}
