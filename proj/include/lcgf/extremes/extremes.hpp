#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lcgf/fields/field_sample.hpp"

namespace lcgf {

enum BadFlag : std::uint32_t { kNearBoundary = 1u, kHighT = 2u, kHighR1 = 4u };

std::string flags_to_string(std::uint32_t flags);

struct ExtremeSummary {
  std::uint64_t replicate = 0;
  double max_value = 0.0;
  /// Lexicographically smallest maximizer.
  Point argmax;
  /// max_value - centering_scale * m_N.
  double centered = 0.0;
  double z_stat = 0.0;
  std::uint32_t bad_flags = 0;
};

/// m_N = sqrt(2d) log N - 3/(2 sqrt(2d)) log log N (natural logs, N >= 3).
double m_n(double N, int d);

/// sqrt(1/(2πā)): the centering multiplier for an unscaled percolation GFF.
double gff_centering_scale(double abar);

/// Z_N = sum_v (sqrt(2d) log N - phi_v) exp(-2d log N + sqrt(2d) phi_v).
double z_statistic(std::span<const double> values, double N, int d);
double z_statistic(const FieldSample& field);

struct CenteringOptions {
  double centering_scale = 1.0;
  /// Relative margin for the near_boundary flag (argmax outside V_N^delta).
  double delta = 0.0;
  /// Optional predicates for the high_T / high_R1 flags at the argmax.
  std::function<bool(Point)> high_t;
  std::function<bool(Point)> high_r1;
};

/// Z_N is evaluated on values / centering_scale so that it sees the unit-normalized field.
ExtremeSummary centered_max(const FieldSample& field, const CenteringOptions& options = {});

struct TailCurve {
  std::vector<double> z_grid;
  std::vector<double> survival;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::int64_t> counts;
  std::int64_t replicates = 0;
};

/// Empirical P(centered >= z) with Wilson 95% intervals; needs >= 100 replicates.
TailCurve tail_curve(std::span<const double> centered, std::span<const double> z_grid);

struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n_points = 0;
  std::string status;  // "ok" or "insufficient_tail_data"
};

/// Least squares of log(survival / z) on z over grid points in [z_lo, z_hi]
/// with z > 0 and at least `min_count` exceedances.
TailFit fit_tail(const TailCurve& curve, double z_lo, double z_hi, std::int64_t min_count = 10);

struct GumbelFit {
  double location = 0.0;
  double scale = 0.0;
  double ks_distance = 0.0;
  int iterations = 0;
};

/// Maximum-likelihood Gumbel fit (Newton on the scale equation, tolerance
/// 1e-9, at most 200 iterations); needs >= 500 values.
GumbelFit gumbel_fit(std::span<const double> values);
double gumbel_cdf(double x, double location, double scale);

struct ConditionalGumbel {
  std::vector<double> z_upper;  // upper Z_N bound of each quartile
  std::vector<GumbelFit> fits;
  std::vector<std::int64_t> sizes;
};

/// Exploratory: Gumbel fits of the centered maxima within each Z_N quartile.
ConditionalGumbel gumbel_fit_by_z_quartile(std::span<const ExtremeSummary> summaries);

struct NearMaxPairs {
  std::int64_t count_close = 0;
  std::int64_t count_mid = 0;
  std::int64_t count_far = 0;
  double threshold = 0.0;
};

/// Pairs among vertices with value >= scale (m_N - c log log L), split by
/// Euclidean distance: < L, [L, N/L], > N/L.
NearMaxPairs near_max_pairs(const FieldSample& field, std::int64_t L, double c = 1.0, double centering_scale = 1.0);

}  // namespace lcgf
