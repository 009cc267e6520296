#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcgf/lattice.hpp"

namespace lcgf {

/// Law of an open edge's conductance on [lambda_minus, lambda_plus].
enum class ConductanceLaw : std::uint8_t { constant = 0, uniform = 1 };

std::string to_string(ConductanceLaw law);
ConductanceLaw parse_conductance_law(const std::string& name);

struct EnvironmentParams {
  Point origin;
  std::int64_t width = 1;
  std::int64_t height = 1;
  double p = 1.0;
  double lambda_minus = 1.0;
  double lambda_plus = 1.0;
  ConductanceLaw law = ConductanceLaw::constant;
  std::uint64_t seed = 0;

  Rect window() const { return {origin, width, height}; }
  /// Throws ParameterError unless 1/2 < p <= 1, 0 < lambda_minus <= lambda_plus and dims >= 1.
  void validate() const;

  friend bool operator==(const EnvironmentParams&, const EnvironmentParams&) = default;
};

/// Nearest-neighbour conductances on a rectangular window of Z^2.
///
/// Horizontal edge (x,y)-(x+1,y) lives at h_edges[(y-y0)*(width-1) + (x-x0)],
/// vertical edge (x,y)-(x,y+1) at v_edges[(y-y0)*width + (x-x0)]. A value of 0
/// marks a closed edge; every other value lies in [lambda_minus, lambda_plus].
class Environment {
 public:
  Environment(EnvironmentParams params, std::vector<double> h_edges, std::vector<double> v_edges);

  const EnvironmentParams& params() const noexcept { return params_; }
  Rect window() const noexcept { return params_.window(); }
  std::span<const double> h_edges() const noexcept { return h_edges_; }
  std::span<const double> v_edges() const noexcept { return v_edges_; }

  /// Conductance of the edge {p, p + offset} for a unit offset; nullopt if the
  /// edge is not inside the window.
  std::optional<double> conductance(Point p, Point offset) const;
  double conductance_or_zero(Point p, Point offset) const { return conductance(p, offset).value_or(0.0); }

  std::size_t edge_count() const noexcept { return h_edges_.size() + v_edges_.size(); }
  std::size_t open_edge_count() const;

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  EnvironmentParams params_;
  std::vector<double> h_edges_;
  std::vector<double> v_edges_;
};

/// I.i.d. environment: each edge carries one uniform U(e) determined by
/// (seed, global edge position); the edge is open iff U(e) < p. Windows
/// generated with the same seed agree on their overlap, and raising p only
/// opens edges.
Environment generate_environment(const EnvironmentParams& params);

/// The same window with every open conductance multiplied by c > 0.
Environment scale_conductances(const Environment& env, double c);

inline constexpr std::uint32_t kEnvironmentFormatVersion = 1;

/// Binary format: "LCGF", u32 version, i64 origin x/y, u64 width/height,
/// f64 p/lambda_minus/lambda_plus, u8 law, u64 seed, then h_edges and v_edges
/// as little-endian f64.
void write_environment(std::ostream& out, const Environment& env);
Environment read_environment(std::istream& in);
void save_environment(const std::string& path, const Environment& env);
Environment load_environment(const std::string& path);

}  // namespace lcgf
