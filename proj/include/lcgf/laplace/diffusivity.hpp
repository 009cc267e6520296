#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <json.hpp>

#include "lcgf/env/clusters.hpp"
#include "lcgf/env/environment.hpp"
#include "lcgf/laplace/operator.hpp"

namespace lcgf {

/// Least-squares fit of G(u,v) ≈ -(1/2πâ) log|u-v| + K̂ over an annulus.
struct DiffusivityFit {
  double abar_hat = 0.0;
  double k_hat = 0.0;
  double residual_max = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::int64_t n_points = 0;
  /// Set when abar_hat falls outside [lambda_minus, lambda_plus]; the value is never clamped.
  bool outside_bounds = false;
};

inline constexpr std::int64_t kMinFitPoints = 30;

/// Fit over proxy vertices u of the column's domain with r_min <= |u-v| <= r_max.
DiffusivityFit fit_diffusivity(const GreenColumn& column, Point v, double r_min, double r_max);

/// Sets fit.outside_bounds from the environment's conductance bounds.
void flag_outside_bounds(DiffusivityFit& fit, const EnvironmentParams& params);

/// Smallest power of two r_min for which the fit over [r_min, r_max] has
/// residual_max <= 1/(â sqrt(r_min)); nullopt if none does.
std::optional<std::int64_t> validity_radius(const GreenColumn& column, Point v, double r_max);

/// Full-plane column at v* and its fit over [r_min, r_max].
DiffusivityFit fit_at_vertex(const Environment& env, const ClusterMap& clusters, Point v, double r_min,
                             double r_max, double window_factor = 4.0);

/// K̂' at v: the fitted intercept of the full-plane column sourced at v*.
double estimate_kprime(const Environment& env, const ClusterMap& clusters, Point v, double r_min, double r_max,
                       double window_factor = 4.0);

/// Mean of â and K̂ over several sources (each projected to the proxy).
DiffusivityFit fit_diffusivity_averaged(const Environment& env, const ClusterMap& clusters,
                                        std::span<const Point> sources, double r_min, double r_max,
                                        double window_factor = 4.0);

nlohmann::ordered_json to_json(const DiffusivityFit& fit);

}  // namespace lcgf
