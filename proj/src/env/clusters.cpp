#include "lcgf/env/clusters.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "lcgf/errors.hpp"

namespace lcgf {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

// Lexicographically first proxy vertex at minimal Euclidean distance from v,
// scanning square rings of growing Chebyshev radius.
std::optional<Point> ring_search(const Rect& window, std::span<const std::int32_t> labels, std::int32_t proxy,
                                 Point v) {
  auto is_proxy = [&](Point q) {
    return window.contains(q) && labels[static_cast<std::size_t>(window.index(q))] == proxy;
  };
  const Point hi = window.hi();
  const std::int64_t r_start = std::max<std::int64_t>(
      {0, window.lo.x - v.x, v.x - hi.x, window.lo.y - v.y, v.y - hi.y});
  const std::int64_t r_limit = std::max<std::int64_t>(
      {std::abs(v.x - window.lo.x), std::abs(v.x - hi.x), std::abs(v.y - window.lo.y), std::abs(v.y - hi.y)});
  std::optional<Point> best;
  std::int64_t best_d2 = 0;
  auto consider = [&](Point q) {
    if (!is_proxy(q)) return;
    const std::int64_t d2 = norm2_squared(q - v);
    if (!best || d2 < best_d2 || (d2 == best_d2 && q < *best)) {
      best = q;
      best_d2 = d2;
    }
  };
  for (std::int64_t r = r_start; r <= r_limit; ++r) {
    if (best && r * r > best_d2) break;
    if (r == 0) {
      consider(v);
      continue;
    }
    for (std::int64_t dx = -r; dx <= r; ++dx) {
      consider({v.x + dx, v.y - r});
      consider({v.x + dx, v.y + r});
    }
    for (std::int64_t dy = -r + 1; dy <= r - 1; ++dy) {
      consider({v.x - r, v.y + dy});
      consider({v.x + r, v.y + dy});
    }
  }
  return best;
}

}  // namespace

ClusterMap::ClusterMap(Rect window, std::vector<std::int32_t> labels, std::vector<std::int64_t> component_sizes,
                       std::int32_t proxy)
    : window_(window), labels_(std::move(labels)), sizes_(std::move(component_sizes)), proxy_(proxy) {
  if (static_cast<std::int64_t>(labels_.size()) != window_.size())
    throw ParameterError("cluster labels do not match the window");
  if (proxy_ < 0 || static_cast<std::size_t>(proxy_) >= sizes_.size() || sizes_[static_cast<std::size_t>(proxy_)] < 1)
    throw ParameterError("empty proxy cluster");
  projection_.resize(labels_.size());
  for (std::int64_t i = 0; i < window_.size(); ++i) {
    const Point v = window_.point(i);
    projection_[static_cast<std::size_t>(i)] =
        labels_[static_cast<std::size_t>(i)] == proxy_ ? v : *ring_search(window_, labels_, proxy_, v);
  }
}

Point ClusterMap::projection(Point v) const {
  if (window_.contains(v)) return projection_[static_cast<std::size_t>(window_.index(v))];
  return nearest_proxy_vertex(v);
}

Point ClusterMap::nearest_proxy_vertex(Point v) const {
  const auto best = ring_search(window_, labels_, proxy_, v);
  if (!best) throw ParameterError("empty proxy cluster");
  return *best;
}

std::int32_t select_proxy_cluster(const Rect& window, std::span<const std::int32_t> labels,
                                  std::span<const std::int64_t> component_sizes) {
  if (component_sizes.empty()) throw ParameterError("no cluster");
  enum : std::uint8_t { kLeft = 1, kRight = 2, kBottom = 4, kTop = 8, kAll = 15 };
  std::vector<std::uint8_t> touches(component_sizes.size(), 0);
  const Point hi = window.hi();
  for (std::int64_t i = 0; i < window.size(); ++i) {
    const std::int32_t l = labels[static_cast<std::size_t>(i)];
    if (l == kNoCluster) continue;
    const Point p = window.point(i);
    auto& t = touches[static_cast<std::size_t>(l)];
    if (p.x == window.lo.x) t |= kLeft;
    if (p.x == hi.x) t |= kRight;
    if (p.y == window.lo.y) t |= kBottom;
    if (p.y == hi.y) t |= kTop;
  }
  std::int32_t crossing = kNoCluster;
  int n_crossing = 0;
  for (std::size_t c = 0; c < touches.size(); ++c)
    if (touches[c] == kAll) {
      if (n_crossing == 0) crossing = static_cast<std::int32_t>(c);
      ++n_crossing;
    }
  if (n_crossing == 1) return crossing;
  std::int32_t largest = 0;
  for (std::size_t c = 1; c < component_sizes.size(); ++c)
    if (component_sizes[c] > component_sizes[static_cast<std::size_t>(largest)]) largest = static_cast<std::int32_t>(c);
  return largest;
}

ClusterMap label_clusters(const Environment& env) {
  const Rect w = env.window();
  const auto n = static_cast<std::size_t>(w.size());
  DisjointSets sets(n);
  std::vector<bool> has_open(n, false);
  for (std::int64_t i = 0; i < w.size(); ++i) {
    const Point p = w.point(i);
    for (Point off : {Point{1, 0}, Point{0, 1}}) {
      const auto a = env.conductance(p, off);
      if (a && *a > 0.0) {
        const auto j = static_cast<std::size_t>(w.index(p + off));
        sets.unite(static_cast<std::size_t>(i), j);
        has_open[static_cast<std::size_t>(i)] = has_open[j] = true;
      }
    }
  }
  std::vector<std::int32_t> labels(n, kNoCluster);
  std::vector<std::int32_t> root_label(n, kNoCluster);
  std::vector<std::int64_t> sizes;
  for (std::size_t i = 0; i < n; ++i) {
    if (!has_open[i]) continue;
    const std::size_t r = sets.find(i);
    if (root_label[r] == kNoCluster) {
      root_label[r] = static_cast<std::int32_t>(sizes.size());
      sizes.push_back(0);
    }
    labels[i] = root_label[r];
    ++sizes[static_cast<std::size_t>(root_label[r])];
  }
  if (sizes.empty()) throw ParameterError("no cluster: the window has no open edge");
  const std::int32_t proxy = select_proxy_cluster(w, labels, sizes);
  return ClusterMap(w, std::move(labels), std::move(sizes), proxy);
}

Point project_to_cluster(const ClusterMap& clusters, Point v) { return clusters.projection(v); }

namespace {

// Breadth-first search over open edges from u. `may_expand` limits which
// vertices can be left from; `is_target` ends the search.
template <typename Expand, typename Target>
std::optional<std::int64_t> bfs(const Environment& env, Point u, Expand may_expand, Target is_target) {
  const Rect w = env.window();
  if (is_target(u)) return 0;
  std::vector<std::int64_t> dist(static_cast<std::size_t>(w.size()), -1);
  std::deque<Point> queue{u};
  dist[static_cast<std::size_t>(w.index(u))] = 0;
  while (!queue.empty()) {
    const Point p = queue.front();
    queue.pop_front();
    if (!may_expand(p)) continue;
    const std::int64_t d = dist[static_cast<std::size_t>(w.index(p))];
    for (Point off : kNeighbourOffsets) {
      const auto a = env.conductance(p, off);
      if (!a || *a <= 0.0) continue;
      const Point q = p + off;
      auto& dq = dist[static_cast<std::size_t>(w.index(q))];
      if (dq >= 0) continue;
      dq = d + 1;
      if (is_target(q)) return dq;
      queue.push_back(q);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::int64_t> chemical_distance(const Environment& env, const ClusterMap& clusters, Point u,
                                              Point target) {
  if (!clusters.in_proxy(u)) throw ParameterError("chemical_distance: source is not on the proxy cluster");
  if (!env.window().contains(target)) return std::nullopt;
  return bfs(env, u, [](Point) { return true; }, [&](Point q) { return q == target; });
}

std::optional<std::int64_t> chemical_distance_to_boundary(const Environment& env, const ClusterMap& clusters,
                                                          Point u, const Box& box) {
  if (!clusters.in_proxy(u)) throw ParameterError("chemical_distance: source is not on the proxy cluster");
  if (!box.contains(u)) throw ParameterError("chemical_distance: source outside the box");
  return bfs(env, u, [&](Point p) { return box.contains(p); }, [&](Point q) { return !box.contains(q); });
}

std::vector<std::int64_t> chemical_distances_to_boundary(const Environment& env, const ClusterMap& clusters,
                                                         const Box& box) {
  const Rect r = box.rect();
  if (!env.window().contains(r)) throw ParameterError("chemical_distance: box must lie in the window");
  std::vector<std::int64_t> dist(static_cast<std::size_t>(r.size()), -1);
  std::deque<Point> queue;
  for (std::int64_t i = 0; i < r.size(); ++i) {
    const Point p = r.point(i);
    if (!clusters.in_proxy(p)) continue;
    for (Point off : kNeighbourOffsets) {
      const auto a = env.conductance(p, off);
      if (a && *a > 0.0 && !r.contains(p + off)) {
        dist[static_cast<std::size_t>(i)] = 1;
        queue.push_back(p);
        break;
      }
    }
  }
  while (!queue.empty()) {
    const Point p = queue.front();
    queue.pop_front();
    const std::int64_t d = dist[static_cast<std::size_t>(r.index(p))];
    for (Point off : kNeighbourOffsets) {
      const Point q = p + off;
      if (!r.contains(q)) continue;
      const auto a = env.conductance(p, off);
      if (!a || *a <= 0.0) continue;
      auto& dq = dist[static_cast<std::size_t>(r.index(q))];
      if (dq >= 0) continue;
      dq = d + 1;
      queue.push_back(q);
    }
  }
  return dist;
}

double cluster_density(const ClusterMap& clusters, const Box& box) {
  if (!clusters.window().contains(box.rect())) throw ParameterError("cluster_density: box must lie in the window");
  std::int64_t count = 0;
  const Rect r = box.rect();
  for (std::int64_t i = 0; i < r.size(); ++i) count += clusters.in_proxy(r.point(i)) ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(r.size());
}

std::vector<Point> outer_boundary(std::span<const Point> set) {
  std::vector<Point> members(set.begin(), set.end());
  std::sort(members.begin(), members.end());
  std::vector<Point> out;
  for (Point p : members)
    for (Point off : kNeighbourOffsets) {
      const Point q = p + off;
      if (!std::binary_search(members.begin(), members.end(), q)) out.push_back(q);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Point> outer_boundary_in_cluster(const ClusterMap& clusters, std::span<const Point> set) {
  auto out = outer_boundary(set);
  std::erase_if(out, [&](Point q) { return !clusters.in_proxy(q); });
  return out;
}

}  // namespace lcgf
