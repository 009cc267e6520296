#include <cmath>

#include "lcgf/errors.hpp"
#include "lcgf/laplace/operator.hpp"

namespace lcgf {

Point mirror_point(Point v, Point w, Point e) {
  if (norm1(e) != 1) throw ParameterError("mirror_point: e must be one of +-e1, +-e2");
  return v - (2 * dot(v - w, e)) * e;
}

Rect fullplane_window(Point v, std::int64_t analysis_radius, double window_factor) {
  if (analysis_radius < 1) throw ParameterError("analysis radius must be positive");
  if (!(window_factor >= 2.0)) throw ParameterError("window factor must be at least 2");
  const auto h = static_cast<std::int64_t>(std::ceil(window_factor * static_cast<double>(analysis_radius) / 2.0));
  return {{v.x - h, v.y - h}, 2 * h + 1, 2 * h + 1};
}

GreenColumn green_fullplane_approx(const Environment& env, const ClusterMap& clusters, Point v,
                                   std::int64_t analysis_radius, double window_factor) {
  if (!clusters.in_proxy(v)) throw ParameterError("full-plane source must lie on the proxy cluster");
  const GreenOperator op(env, clusters, fullplane_window(v, analysis_radius, window_factor));
  GreenColumn column = op.column(v);
  const double at_source = column.values[op.index()[v]];
  column.values.array() -= at_source;
  column.outside = -at_source;
  column.domain = GreenDomain::fullplane_approx;
  return column;
}

GreenColumn green_halfspace_approx(const Environment& env, const ClusterMap& clusters, Point w, Point e, Point v,
                                   const Rect& window) {
  if (norm1(e) != 1) throw ParameterError("half-space direction must be one of +-e1, +-e2");
  Rect half = window;
  if (e.x == 1) half = {{w.x, window.lo.y}, window.lo.x + window.width - w.x, window.height};
  if (e.x == -1) half = {window.lo, w.x - window.lo.x + 1, window.height};
  if (e.y == 1) half = {{window.lo.x, w.y}, window.width, window.lo.y + window.height - w.y};
  if (e.y == -1) half = {window.lo, window.width, w.y - window.lo.y + 1};
  half = intersect(half, window);
  if (dot(v - w, e) < 0 || !half.contains(v)) throw ParameterError("source is not in the half-space window");
  const GreenOperator op(env, clusters, half);
  GreenColumn column = op.column(v);
  column.domain = GreenDomain::halfspace_approx;
  return column;
}

}  // namespace lcgf
