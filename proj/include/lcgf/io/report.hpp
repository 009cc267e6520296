#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lcgf/audit/audit.hpp"
#include "lcgf/extremes/extremes.hpp"
#include "lcgf/fields/field_sample.hpp"
#include "lcgf/io/config.hpp"
#include "lcgf/laplace/operator.hpp"

namespace lcgf {

using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// CSV with a "# schema_version=N" line, optional "# config ..." echo lines,
/// then the header. Doubles are written with 17 significant digits.
void write_csv(std::ostream& out, const Table& table, const nlohmann::ordered_json& config = {});
void write_json(std::ostream& out, const nlohmann::ordered_json& value);

struct CsvData {
  int schema_version = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};
CsvData read_csv(std::istream& in);

Table green_column_table(const GreenColumn& column);
/// replicate, x, y, value; y is 0 for d = 1.
Table field_table(std::span<const FieldSample> fields);
nlohmann::ordered_json field_sidecar(const FieldSample& field, std::uint64_t seed);
Table summary_table(std::span<const ExtremeSummary> summaries);
Table tail_curve_table(const TailCurve& curve);
Table residual_table(const AssumptionReport& report);
Table level_set_table(const LevelSetProfile& profile);

/// Rebuild fields from a field CSV. Each replicate must cover a full box
/// side^d; the corner is the coordinate-wise minimum.
std::vector<FieldSample> fields_from_csv(const CsvData& data, int d);

}  // namespace lcgf
