#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "lcgf/lattice.hpp"

namespace lcgf {

enum class FieldModel { gff, gff_extended, brw, mbrw, approx };

std::string to_string(FieldModel model);
FieldModel parse_field_model(const std::string& name);

/// One real value per vertex of V_N(corner) in dimension 1 or 2. Values are
/// indexed with the first coordinate fastest (row-major for d = 2).
struct FieldSample {
  int dim = 2;
  Point corner;
  std::int64_t side = 0;
  Eigen::VectorXd values;
  FieldModel model = FieldModel::gff;
  double scaling = 1.0;
  std::uint64_t replicate_id = 0;
  std::uint64_t rng_stream = 0;

  Eigen::Index size() const noexcept { return values.size(); }
  Point point(Eigen::Index i) const {
    if (dim == 1) return {corner.x + i, corner.y};
    return {corner.x + i % side, corner.y + i / side};
  }
  Eigen::Index index(Point p) const {
    if (dim == 1) return p.x - corner.x;
    return (p.y - corner.y) * side + (p.x - corner.x);
  }
  double value(Point p) const { return values[index(p)]; }
};

/// Number of vertices side^dim; throws ParameterError on overflow or bad dim.
std::int64_t lattice_volume(std::int64_t side, int dim);

}  // namespace lcgf
