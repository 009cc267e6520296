#include "lcgf/fields/field_sample.hpp"

#include <limits>

#include "lcgf/errors.hpp"

namespace lcgf {

std::string to_string(FieldModel model) {
  switch (model) {
    case FieldModel::gff: return "gff";
    case FieldModel::gff_extended: return "gff_extended";
    case FieldModel::brw: return "brw";
    case FieldModel::mbrw: return "mbrw";
    case FieldModel::approx: return "approx";
  }
  return "unknown";
}

FieldModel parse_field_model(const std::string& name) {
  if (name == "gff") return FieldModel::gff;
  if (name == "gff_extended") return FieldModel::gff_extended;
  if (name == "brw") return FieldModel::brw;
  if (name == "mbrw") return FieldModel::mbrw;
  if (name == "approx") return FieldModel::approx;
  throw ParameterError("unknown field model '" + name + "'");
}

std::int64_t lattice_volume(std::int64_t side, int dim) {
  if (side < 1) throw ParameterError("side must be positive");
  if (dim < 1) throw ParameterError("dimension must be at least 1");
  std::int64_t volume = 1;
  for (int k = 0; k < dim; ++k) {
    if (volume > std::numeric_limits<std::int64_t>::max() / side) throw ParameterError("lattice volume overflows");
    volume *= side;
  }
  return volume;
}

}  // namespace lcgf
