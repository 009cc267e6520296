#include <set>

#include "lcgf/audit/audit.hpp"
#include "lcgf/errors.hpp"

namespace lcgf {

LevelSetProfile level_set_profile(const GreenColumn& column, const ClusterMap& clusters, Point u,
                                  std::int64_t max_k) {
  const VertexIndex& index = *column.index;
  if (!index.contains(u)) throw ParameterError("level_set_profile: u is not in the column's domain");
  if (max_k <= 0) max_k = index.size();

  auto better = [&](Point a, Point b) {
    const double va = column.value(a);
    const double vb = column.value(b);
    return va != vb ? va > vb : a < b;
  };
  std::set<Point, decltype(better)> frontier(better);
  std::vector<char> in_set(static_cast<std::size_t>(index.size()), 0);
  std::set<Point> boundary;
  std::set<Point> members;

  LevelSetProfile out;
  out.source = u;
  double theta = std::numeric_limits<double>::infinity();
  auto add = [&](Point x) {
    in_set[static_cast<std::size_t>(index[x])] = 1;
    members.insert(x);
    boundary.erase(x);
    theta = std::min(theta, column.value(x));
    for (Point off : kNeighbourOffsets) {
      const Point y = x + off;
      if (members.count(y)) continue;
      if (clusters.in_proxy(y)) boundary.insert(y);
      if (index.contains(y) && !in_set[static_cast<std::size_t>(index[y])]) frontier.insert(y);
    }
    out.order.push_back(x);
    out.theta.push_back(theta);
    out.set_sizes.push_back(static_cast<std::int64_t>(members.size()));
    out.boundary_sizes.push_back(static_cast<std::int64_t>(boundary.size()));
  };
  add(u);
  while (static_cast<std::int64_t>(members.size()) < max_k && !frontier.empty()) {
    const Point next = *frontier.begin();
    frontier.erase(frontier.begin());
    if (in_set[static_cast<std::size_t>(index[next])]) continue;
    add(next);
  }
  return out;
}

nlohmann::ordered_json to_json(const LevelSetProfile& profile) {
  nlohmann::ordered_json j;
  j["source"] = {profile.source.x, profile.source.y};
  j["theta"] = profile.theta;
  j["set_sizes"] = profile.set_sizes;
  j["boundary_sizes"] = profile.boundary_sizes;
  return j;
}

}  // namespace lcgf
