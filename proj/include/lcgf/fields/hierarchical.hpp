#pragma once

#include <cstdint>
#include <span>

#include "lcgf/fields/field_sample.hpp"
#include "lcgf/lattice.hpp"

namespace lcgf {

/// V_N(w) with N = 2^n in dimension d (sampling supports d in {1, 2}).
struct HierarchyConfig {
  std::int64_t N = 1;
  int d = 2;
  Point w;

  /// n with N = 2^n; throws ParameterError if N is not a power of two.
  int levels() const;
  void validate() const;
};

/// |x|_{~,N}: Euclidean norm of x modulo N Z^d.
double quotient_norm(std::span<const std::int64_t> x, std::int64_t N);
double quotient_norm(Point x, std::int64_t N, int d = 2);

/// Psi(v) = w' + floor(N'/N) (v - w).
Point upscale_map(Point v, Point w, Point w_prime, std::int64_t N, std::int64_t N_prime);

/// Number of dyadic levels j in [0, n] at which u and v lie in the same tile
/// of side 2^j, times log 2.
double analytic_brw_covariance(std::int64_t N, std::span<const std::int64_t> u, std::span<const std::int64_t> v);
double analytic_brw_covariance(const HierarchyConfig& config, Point u, Point v);

/// Number of c in Z_N such that both 0 and delta lie in c + [0, b) mod N.
std::int64_t wrapped_pair_count(std::int64_t N, std::int64_t b, std::int64_t delta);

/// Sum over levels of 2^{-jd} log 2 times the number of wrapped boxes of side
/// 2^j containing both u and v.
double analytic_mbrw_covariance(std::int64_t N, std::span<const std::int64_t> u, std::span<const std::int64_t> v);
double analytic_mbrw_covariance(const HierarchyConfig& config, Point u, Point v);

/// theta_v = sum_j X_{j, Q_j(v)}, X i.i.d. N(0, log 2) per dyadic tile.
FieldSample sample_brw(const HierarchyConfig& config, std::uint64_t master_seed, std::uint64_t replicate);

struct MbrwOptions {
  /// Largest admissible level array (N^d box variables) without streaming.
  std::int64_t max_level_boxes = std::int64_t{1} << 24;
  bool streaming = false;
};

/// theta~_v = sum_j sum_{Q_j wrapped, v in Q_j} Y_{j,Q_j}, Y i.i.d. N(0, 2^{-jd} log 2).
/// Each level is a separable cyclic moving sum of its box variables.
FieldSample sample_mbrw(const HierarchyConfig& config, std::uint64_t master_seed, std::uint64_t replicate,
                        const MbrwOptions& options = {});

/// Same field drawn from an explicit stream id (used for composite fields).
FieldSample sample_mbrw_stream(const HierarchyConfig& config, std::uint64_t stream, const MbrwOptions& options = {});

/// Direct per-vertex summation over all wrapped boxes (N <= 32). Consumes the
/// random stream in the same order as sample_mbrw.
FieldSample sample_mbrw_reference(const HierarchyConfig& config, std::uint64_t master_seed,
                                  std::uint64_t replicate);

}  // namespace lcgf
