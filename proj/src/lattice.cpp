#include "lcgf/lattice.hpp"

#include <algorithm>

#include "lcgf/errors.hpp"

namespace lcgf {

Rect intersect(const Rect& a, const Rect& b) {
  const std::int64_t x0 = std::max(a.lo.x, b.lo.x);
  const std::int64_t y0 = std::max(a.lo.y, b.lo.y);
  const std::int64_t x1 = std::min(a.lo.x + a.width, b.lo.x + b.width);
  const std::int64_t y1 = std::min(a.lo.y + a.height, b.lo.y + b.height);
  return {{x0, y0}, std::max<std::int64_t>(0, x1 - x0), std::max<std::int64_t>(0, y1 - y0)};
}

std::vector<Point> Box::vertices() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(size()));
  const Rect r = rect();
  for (std::int64_t i = 0; i < r.size(); ++i) out.push_back(r.point(i));
  return out;
}

std::vector<Point> Box::inner_vertices() const {
  std::vector<Point> out;
  const Rect r = rect();
  for (std::int64_t i = 0; i < r.size(); ++i) {
    const Point p = r.point(i);
    if (in_inner(p)) out.push_back(p);
  }
  return out;
}

std::vector<Point> tiling_corners(const Box& box, std::int64_t sub_side) {
  if (sub_side < 1 || sub_side > box.side) throw ParameterError("tiling: sub-box side must lie in [1, N]");
  const std::int64_t per_axis = box.side / sub_side;
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(per_axis * per_axis));
  for (std::int64_t j = 0; j < per_axis; ++j)
    for (std::int64_t i = 0; i < per_axis; ++i)
      out.push_back({box.corner.x + i * sub_side, box.corner.y + j * sub_side});
  return out;
}

}  // namespace lcgf
