#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace lcgf {

/// A vertex of Z^2. Ordering is lexicographic (x first, then y).
struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend constexpr auto operator<=>(const Point&, const Point&) = default;
  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(std::int64_t k, Point a) { return {k * a.x, k * a.y}; }
};

constexpr std::int64_t dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr std::int64_t norm1(Point a) {
  return (a.x < 0 ? -a.x : a.x) + (a.y < 0 ? -a.y : a.y);
}
constexpr std::int64_t norm_inf(Point a) {
  const std::int64_t ax = a.x < 0 ? -a.x : a.x;
  const std::int64_t ay = a.y < 0 ? -a.y : a.y;
  return ax > ay ? ax : ay;
}
constexpr std::int64_t norm2_squared(Point a) { return a.x * a.x + a.y * a.y; }
inline double norm2(Point a) { return std::sqrt(static_cast<double>(norm2_squared(a))); }

inline constexpr Point kNeighbourOffsets[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

/// Axis-aligned rectangle of lattice points [lo.x, lo.x+width) x [lo.y, lo.y+height).
/// Linear indices are row-major: index = (y - lo.y) * width + (x - lo.x).
struct Rect {
  Point lo;
  std::int64_t width = 0;
  std::int64_t height = 0;

  constexpr std::int64_t size() const { return width * height; }
  constexpr bool empty() const { return width <= 0 || height <= 0; }
  constexpr Point hi() const { return {lo.x + width - 1, lo.y + height - 1}; }
  constexpr bool contains(Point p) const {
    return p.x >= lo.x && p.y >= lo.y && p.x < lo.x + width && p.y < lo.y + height;
  }
  constexpr bool contains(const Rect& r) const {
    return r.empty() || (contains(r.lo) && contains(r.hi()));
  }
  constexpr std::int64_t index(Point p) const { return (p.y - lo.y) * width + (p.x - lo.x); }
  constexpr Point point(std::int64_t i) const { return {lo.x + i % width, lo.y + i / width}; }
  /// The rectangle grown by `k` in every direction.
  constexpr Rect grown(std::int64_t k) const { return {{lo.x - k, lo.y - k}, width + 2 * k, height + 2 * k}; }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

Rect intersect(const Rect& a, const Rect& b);

/// The lattice cube V_N(w) = w + [0, N-1]^2 with an optional relative margin delta.
struct Box {
  Point corner;
  std::int64_t side = 1;
  double delta = 0.0;

  constexpr Rect rect() const { return {corner, side, side}; }
  constexpr bool contains(Point p) const { return rect().contains(p); }
  constexpr std::int64_t size() const { return side * side; }

  /// Euclidean distance from p (inside the box) to the outer boundary.
  constexpr std::int64_t distance_to_outer_boundary(Point p) const {
    const std::int64_t a = p.x - corner.x + 1;
    const std::int64_t b = p.y - corner.y + 1;
    const std::int64_t c = corner.x + side - p.x;
    const std::int64_t d = corner.y + side - p.y;
    std::int64_t m = a < b ? a : b;
    m = m < c ? m : c;
    return m < d ? m : d;
  }

  /// Membership in V_N^delta(w).
  bool in_inner(Point p) const {
    return contains(p) &&
           static_cast<double>(distance_to_outer_boundary(p)) >= delta * static_cast<double>(side);
  }
  bool in_inner(Point p, double margin) const {
    return contains(p) &&
           static_cast<double>(distance_to_outer_boundary(p)) >= margin * static_cast<double>(side);
  }

  std::vector<Point> vertices() const;
  std::vector<Point> inner_vertices() const;
};

/// Corners W_{N,L}(w) of the disjoint tiling of V_N(w) by cubes of side L.
std::vector<Point> tiling_corners(const Box& box, std::int64_t sub_side);

}  // namespace lcgf
