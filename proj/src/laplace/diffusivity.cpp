#include "lcgf/laplace/diffusivity.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "lcgf/errors.hpp"

namespace lcgf {

DiffusivityFit fit_diffusivity(const GreenColumn& column, Point v, double r_min, double r_max) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw ParameterError("fit_diffusivity: need 0 < r_min < r_max");
  const Rect& region = column.index->region();
  if (column.domain == GreenDomain::fullplane_approx &&
      4.0 * r_max > static_cast<double>(std::min(region.width, region.height)))
    throw ParameterError("fit_diffusivity: r_max exceeds a quarter of the window");

  std::vector<double> xs;
  std::vector<double> ys;
  for (Eigen::Index i = 0; i < column.index->size(); ++i) {
    const double r = norm2(column.index->vertex(i) - v);
    if (r < r_min || r > r_max) continue;
    xs.push_back(std::log(r));
    ys.push_back(column.values[i]);
  }
  const auto n = static_cast<std::int64_t>(xs.size());
  if (n < kMinFitPoints) throw ParameterError("fit_diffusivity: annulus too thin (fewer than 30 points)");

  Eigen::Map<const Eigen::VectorXd> x(xs.data(), n);
  Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  if (!(slope < 0.0)) throw NumericalError("degenerate_fit", "Green column does not decay with distance");

  DiffusivityFit fit;
  fit.abar_hat = -1.0 / (2.0 * std::numbers::pi * slope);
  fit.k_hat = my - slope * mx;
  fit.residual_max = (y.array() - fit.k_hat - slope * x.array()).abs().maxCoeff();
  fit.r_min = r_min;
  fit.r_max = r_max;
  fit.n_points = n;
  return fit;
}

void flag_outside_bounds(DiffusivityFit& fit, const EnvironmentParams& params) {
  fit.outside_bounds = fit.abar_hat < params.lambda_minus || fit.abar_hat > params.lambda_plus;
}

std::optional<std::int64_t> validity_radius(const GreenColumn& column, Point v, double r_max) {
  for (std::int64_t r = 1; 2 * r <= static_cast<std::int64_t>(r_max); r *= 2) {
    DiffusivityFit fit;
    try {
      fit = fit_diffusivity(column, v, static_cast<double>(r), r_max);
    } catch (const ParameterError&) {
      break;
    } catch (const NumericalError&) {
      continue;
    }
    if (fit.residual_max <= 1.0 / (fit.abar_hat * std::sqrt(static_cast<double>(r)))) return r;
  }
  return std::nullopt;
}

DiffusivityFit fit_at_vertex(const Environment& env, const ClusterMap& clusters, Point v, double r_min,
                             double r_max, double window_factor) {
  const Point source = clusters.projection(v);
  const auto radius = static_cast<std::int64_t>(std::ceil(r_max));
  const GreenColumn column = green_fullplane_approx(env, clusters, source, radius, window_factor);
  DiffusivityFit fit = fit_diffusivity(column, source, r_min, r_max);
  flag_outside_bounds(fit, env.params());
  return fit;
}

double estimate_kprime(const Environment& env, const ClusterMap& clusters, Point v, double r_min, double r_max,
                       double window_factor) {
  return fit_at_vertex(env, clusters, v, r_min, r_max, window_factor).k_hat;
}

DiffusivityFit fit_diffusivity_averaged(const Environment& env, const ClusterMap& clusters,
                                        std::span<const Point> sources, double r_min, double r_max,
                                        double window_factor) {
  if (sources.empty()) throw ParameterError("fit_diffusivity_averaged: no sources");
  DiffusivityFit mean;
  mean.r_min = r_min;
  mean.r_max = r_max;
  for (Point v : sources) {
    const DiffusivityFit fit = fit_at_vertex(env, clusters, v, r_min, r_max, window_factor);
    mean.abar_hat += fit.abar_hat;
    mean.k_hat += fit.k_hat;
    mean.residual_max = std::max(mean.residual_max, fit.residual_max);
    mean.n_points += fit.n_points;
  }
  mean.abar_hat /= static_cast<double>(sources.size());
  mean.k_hat /= static_cast<double>(sources.size());
  flag_outside_bounds(mean, env.params());
  return mean;
}

nlohmann::ordered_json to_json(const DiffusivityFit& fit) {
  return {{"abar_hat", fit.abar_hat}, {"k_hat", fit.k_hat},       {"residual_max", fit.residual_max},
          {"r_min", fit.r_min},       {"r_max", fit.r_max},       {"n_points", fit.n_points},
          {"outside_bounds", fit.outside_bounds}};
}

}  // namespace lcgf
