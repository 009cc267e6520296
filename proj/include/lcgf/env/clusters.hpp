#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lcgf/env/environment.hpp"
#include "lcgf/lattice.hpp"

namespace lcgf {

/// Label of vertices without any open incident edge.
inline constexpr std::int32_t kNoCluster = -1;

/// Connected components of the open-edge graph on a window, the component
/// standing in for the infinite cluster, and the projection v -> v*.
class ClusterMap {
 public:
  ClusterMap(Rect window, std::vector<std::int32_t> labels, std::vector<std::int64_t> component_sizes,
             std::int32_t proxy);

  const Rect& window() const noexcept { return window_; }
  std::span<const std::int32_t> labels() const noexcept { return labels_; }
  std::span<const std::int64_t> component_sizes() const noexcept { return sizes_; }
  std::int32_t proxy_cluster() const noexcept { return proxy_; }
  std::int64_t proxy_size() const { return sizes_[static_cast<std::size_t>(proxy_)]; }

  std::int32_t label(Point p) const {
    return window_.contains(p) ? labels_[static_cast<std::size_t>(window_.index(p))] : kNoCluster;
  }
  bool in_proxy(Point p) const { return label(p) == proxy_; }

  /// v* for a window vertex (table lookup); outside the window the nearest
  /// proxy vertex is searched directly.
  Point projection(Point v) const;
  std::span<const Point> projection_table() const noexcept { return projection_; }

  /// Nearest proxy vertex in Euclidean distance, ties broken lexicographically.
  Point nearest_proxy_vertex(Point v) const;

 private:
  Rect window_;
  std::vector<std::int32_t> labels_;
  std::vector<std::int64_t> sizes_;
  std::int32_t proxy_;
  std::vector<Point> projection_;
};

/// Union-find labelling of open-edge components. Component ids are assigned in
/// row-major order of each component's first vertex. Throws ParameterError
/// ("no cluster") if the window has no open edge.
ClusterMap label_clusters(const Environment& env);

/// The component crossing the window in both axis directions, if unique;
/// otherwise the largest component (ties: smallest id).
std::int32_t select_proxy_cluster(const Rect& window, std::span<const std::int32_t> labels,
                                  std::span<const std::int64_t> component_sizes);

/// v* = nearest vertex of the proxy cluster to v (lexicographic tie-break).
Point project_to_cluster(const ClusterMap& clusters, Point v);

/// Length of a shortest open path from u (on the proxy) to `target`; nullopt if
/// unreachable inside the window.
std::optional<std::int64_t> chemical_distance(const Environment& env, const ClusterMap& clusters, Point u,
                                              Point target);

/// Length of a shortest open path from u (on the proxy, inside `box`) to the
/// outer boundary of `box`, moving only through vertices of the box.
std::optional<std::int64_t> chemical_distance_to_boundary(const Environment& env, const ClusterMap& clusters,
                                                          Point u, const Box& box);

/// chemical_distance_to_boundary for every box vertex at once (row-major over
/// the box; -1 where unreachable or off the proxy). One multi-source search.
std::vector<std::int64_t> chemical_distances_to_boundary(const Environment& env, const ClusterMap& clusters,
                                                         const Box& box);

/// |proxy ∩ box| / |box|; the box must lie in the window.
double cluster_density(const ClusterMap& clusters, const Box& box);

/// All lattice vertices at distance 1 from `set` and not in it, sorted.
std::vector<Point> outer_boundary(std::span<const Point> set);

/// outer_boundary restricted to vertices of the proxy cluster.
std::vector<Point> outer_boundary_in_cluster(const ClusterMap& clusters, std::span<const Point> set);

}  // namespace lcgf
