#include "lcgf/io/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <cmath>
#include <limits>
#include <sstream>

#include "lcgf/errors.hpp"

namespace lcgf {

namespace {

template <class T>
T parse_field(const std::string& s) {
  T x{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParameterError("malformed CSV number '" + s + "'");
  return x;
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", v);
          return buf;
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ParameterError("row width does not match header");
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Table& table, const nlohmann::ordered_json& config) {
  out << "# schema_version=" << kSchemaVersion << "\n";
  if (!config.is_null()) out << "# config " << config.dump() << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << "\n";
  }
}

void write_json(std::ostream& out, const nlohmann::ordered_json& value) { out << value.dump(2) << "\n"; }

std::size_t CsvData::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ParameterError("CSV has no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

CsvData read_csv(std::istream& in) {
  CsvData data;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# schema_version=", 0) == 0) data.schema_version = std::stoi(line.substr(17));
      continue;
    }
    if (data.columns.empty()) {
      data.columns = split(line);
      continue;
    }
    auto row = split(line);
    if (row.size() != data.columns.size()) throw ParameterError("ragged CSV row: " + line);
    data.rows.push_back(std::move(row));
  }
  if (data.columns.empty()) throw ParameterError("CSV has no header");
  return data;
}

Table green_column_table(const GreenColumn& column) {
  Table t{{"x", "y", "value"}, {}};
  for (Eigen::Index i = 0; i < column.values.size(); ++i) {
    const Point p = column.index->vertex(i);
    t.add_row({p.x, p.y, column.values[i]});
  }
  return t;
}

Table field_table(std::span<const FieldSample> fields) {
  Table t{{"replicate", "x", "y", "value"}, {}};
  for (const auto& f : fields)
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const Point p = f.point(i);
      t.add_row({f.replicate_id, p.x, f.dim == 1 ? std::int64_t{0} : p.y, f.values[i]});
    }
  return t;
}

nlohmann::ordered_json field_sidecar(const FieldSample& field, std::uint64_t seed) {
  return {{"model", to_string(field.model)}, {"N", field.side},   {"d", field.dim},
          {"seed", seed},                    {"stream", field.rng_stream}, {"scaling", field.scaling}};
}

Table summary_table(std::span<const ExtremeSummary> summaries) {
  Table t{{"replicate", "max", "centered", "z_stat", "argmax_x", "argmax_y", "flags"}, {}};
  for (const auto& s : summaries)
    t.add_row({s.replicate, s.max_value, s.centered, s.z_stat, s.argmax.x, s.argmax.y, flags_to_string(s.bad_flags)});
  return t;
}

Table tail_curve_table(const TailCurve& curve) {
  Table t{{"z", "survival", "lo", "hi"}, {}};
  for (std::size_t i = 0; i < curve.z_grid.size(); ++i)
    t.add_row({curve.z_grid[i], curve.survival[i], curve.lo[i], curve.hi[i]});
  return t;
}

Table residual_table(const AssumptionReport& report) {
  Table t{{"u_x", "u_y", "v_x", "v_y", "residual"}, {}};
  for (const auto& r : report.residual_grid) t.add_row({r.u.x, r.u.y, r.v.x, r.v.y, r.residual});
  return t;
}

Table level_set_table(const LevelSetProfile& profile) {
  Table t{{"k", "x", "y", "theta", "boundary_size"}, {}};
  for (std::size_t i = 0; i < profile.theta.size(); ++i)
    t.add_row({profile.set_sizes[i], profile.order[i].x, profile.order[i].y, profile.theta[i],
               profile.boundary_sizes[i]});
  return t;
}

std::vector<FieldSample> fields_from_csv(const CsvData& data, int d) {
  if (d != 1 && d != 2) throw ParameterError("d must be 1 or 2");
  const auto c_rep = data.column("replicate"), c_x = data.column("x"), c_y = data.column("y"),
             c_v = data.column("value");
  struct Raw {
    std::vector<Point> points;
    std::vector<double> values;
  };
  std::map<std::uint64_t, Raw> by_rep;
  for (const auto& row : data.rows) {
    auto& raw = by_rep[parse_field<std::uint64_t>(row[c_rep])];
    raw.points.push_back({parse_field<std::int64_t>(row[c_x]), d == 1 ? 0 : parse_field<std::int64_t>(row[c_y])});
    raw.values.push_back(parse_field<double>(row[c_v]));
  }
  std::vector<FieldSample> out;
  for (auto& [rep, raw] : by_rep) {
    FieldSample f;
    f.dim = d;
    f.replicate_id = rep;
    const auto n = static_cast<std::int64_t>(raw.points.size());
    std::int64_t side = n;
    if (d == 2) {
      side = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (side * side != n) throw ParameterError("replicate " + std::to_string(rep) + " is not a square box");
    }
    f.side = side;
    f.corner = raw.points.front();
    for (Point p : raw.points) f.corner = {std::min(f.corner.x, p.x), std::min(f.corner.y, p.y)};
    f.values = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < raw.points.size(); ++i) {
      const Point p = raw.points[i];
      if (p.x - f.corner.x >= side || p.y - f.corner.y >= side)
        throw ParameterError("replicate " + std::to_string(rep) + " does not fill a box");
      f.values[f.index(p)] = raw.values[i];
    }
    if (f.values.hasNaN()) throw ParameterError("replicate " + std::to_string(rep) + " has missing vertices");
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace lcgf
