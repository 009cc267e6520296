#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "lcgf/errors.hpp"
#include "lcgf/fields/hierarchical.hpp"
#include "lcgf/io/config.hpp"
#include "lcgf/io/report.hpp"

using namespace lcgf;

TEST_CASE("empty table gives a header-only CSV") {
  Table t{{"a", "b"}, {}};
  std::ostringstream out;
  write_csv(out, t);
  CHECK(out.str() == "# schema_version=1\na,b\n");
  std::istringstream in(out.str());
  const CsvData d = read_csv(in);
  CHECK(d.schema_version == 1);
  CHECK(d.columns == std::vector<std::string>{"a", "b"});
  CHECK(d.rows.empty());
}

TEST_CASE("rows must match the header width") {
  Table t{{"a", "b"}, {}};
  CHECK_THROWS(t.add_row({std::int64_t{1}}));
}

TEST_CASE("doubles survive a CSV round trip bit for bit") {
  const std::vector<double> values{0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, std::nextafter(1.0, 2.0),
                                   std::numeric_limits<double>::denorm_min()};
  Table t{{"i", "v"}, {}};
  for (std::size_t i = 0; i < values.size(); ++i) t.add_row({static_cast<std::int64_t>(i), values[i]});
  std::ostringstream out;
  write_csv(out, t, {{"seed", 7}});
  std::istringstream in(out.str());
  const CsvData d = read_csv(in);
  REQUIRE(d.rows.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) CHECK(std::strtod(d.rows[i][d.column("v")].c_str(), nullptr) == values[i]);
  CHECK(out.str().find("# config {\"seed\":7}") != std::string::npos);
  CHECK_THROWS(d.column("missing"));
}

TEST_CASE("JSON output reparses to the same value") {
  nlohmann::ordered_json j{{"x", 0.1}, {"list", {1, 2, 3}}, {"nested", {{"s", "text"}, {"b", true}}}};
  std::ostringstream out;
  write_json(out, j);
  CHECK(nlohmann::ordered_json::parse(out.str()) == j);
}

TEST_CASE("format_double is the shortest round-trip form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(format_double(third)) == third);
}

TEST_CASE("experiment config round trips through text") {
  ExperimentConfig c;
  c.set("env", "p", 0.75);
  c.set("env", "seed", std::int64_t{12345678901});
  c.set("env", "law", std::string("uniform"));
  c.set("sample", "scaling", 1.0 / 3.0);
  c.set("sample", "note", std::string("two words"));
  const std::string text = c.to_text();
  const ExperimentConfig back = ExperimentConfig::parse_text(text);
  CHECK(back == c);
  CHECK(back.to_text() == text);
  CHECK(back.get_double("sample", "scaling") == 1.0 / 3.0);
  CHECK(back.get_int("env", "seed") == 12345678901);
  CHECK(back.get("env", "law") == "uniform");
  CHECK(back.schema_version() == kSchemaVersion);
  CHECK(!back.has("env", "missing"));
  CHECK_THROWS(back.get("env", "missing"));
  CHECK_THROWS(back.get_int("env", "law"));
  CHECK(back.to_json()["env"]["p"] == "0.75");
}

TEST_CASE("field CSV round trip") {
  std::vector<FieldSample> fields;
  for (std::uint64_t r = 0; r < 3; ++r) {
    FieldSample f = sample_mbrw({8, 2, {5, -3}}, 9, r);
    fields.push_back(f);
  }
  std::ostringstream out;
  write_csv(out, field_table(fields));
  std::istringstream in(out.str());
  const auto back = fields_from_csv(read_csv(in), 2);
  REQUIRE(back.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(back[r].corner == Point{5, -3});
    CHECK(back[r].side == 8);
    CHECK(back[r].values == fields[r].values);
  }
}

TEST_CASE("incomplete field CSV is rejected") {
  std::istringstream in("# schema_version=1\nreplicate,x,y,value\n0,0,0,1\n0,1,0,1\n0,0,1,1\n");
  CHECK_THROWS(fields_from_csv(read_csv(in), 2));
}

TEST_CASE("summary and tail tables carry their columns") {
  ExtremeSummary s;
  s.max_value = 1.0;
  s.argmax = {2, 3};
  const std::vector<ExtremeSummary> ss{s};
  const Table t = summary_table(ss);
  CHECK(t.columns.front() == "replicate");
  CHECK(t.rows.size() == 1);
  TailCurve tc;
  tc.z_grid = {0.0};
  tc.survival = {0.5};
  tc.lo = {0.4};
  tc.hi = {0.6};
  tc.counts = {50};
  CHECK(tail_curve_table(tc).columns == std::vector<std::string>{"z", "survival", "lo", "hi"});
}
