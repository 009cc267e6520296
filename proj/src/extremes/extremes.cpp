#include "lcgf/extremes/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lcgf/errors.hpp"
#include "lcgf/lattice.hpp"

namespace lcgf {

std::string flags_to_string(std::uint32_t flags) {
  std::string out;
  auto add = [&](std::uint32_t bit, const char* name) {
    if (!(flags & bit)) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(kNearBoundary, "near_boundary");
  add(kHighT, "high_T");
  add(kHighR1, "high_R1");
  return out;
}

double m_n(double N, int d) {
  if (!(N >= 3.0)) throw ParameterError("m_N needs N >= 3");
  if (d < 1) throw ParameterError("m_N needs d >= 1");
  const double r = std::sqrt(2.0 * d);
  return r * std::log(N) - 3.0 / (2.0 * r) * std::log(std::log(N));
}

double gff_centering_scale(double abar) {
  if (!(abar > 0.0)) throw ParameterError("abar must be positive");
  return std::sqrt(1.0 / (2.0 * std::numbers::pi * abar));
}

double z_statistic(std::span<const double> values, double N, int d) {
  const double r = std::sqrt(2.0 * d);
  const double log_n = std::log(N);
  double z = 0.0;
  for (double phi : values) z += (r * log_n - phi) * std::exp(-2.0 * d * log_n + r * phi);
  return z;
}

double z_statistic(const FieldSample& field) {
  return z_statistic({field.values.data(), static_cast<std::size_t>(field.values.size())},
                     static_cast<double>(field.side), field.dim);
}

ExtremeSummary centered_max(const FieldSample& field, const CenteringOptions& options) {
  if (field.size() == 0) throw ParameterError("centered_max: empty field");
  ExtremeSummary s;
  s.replicate = field.replicate_id;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < field.size(); ++i) {
    const double v = field.values[i];
    if (v > field.values[best] || (v == field.values[best] && field.point(i) < field.point(best))) best = i;
  }
  s.max_value = field.values[best];
  s.argmax = field.point(best);
  s.centered = s.max_value - options.centering_scale * m_n(static_cast<double>(field.side), field.dim);
  const Eigen::VectorXd unit = field.values / options.centering_scale;
  s.z_stat = z_statistic({unit.data(), static_cast<std::size_t>(unit.size())}, static_cast<double>(field.side),
                         field.dim);
  if (options.delta > 0.0 && field.dim == 2 && !Box{field.corner, field.side, options.delta}.in_inner(s.argmax))
    s.bad_flags |= kNearBoundary;
  if (options.high_t && options.high_t(s.argmax)) s.bad_flags |= kHighT;
  if (options.high_r1 && options.high_r1(s.argmax)) s.bad_flags |= kHighR1;
  return s;
}

TailCurve tail_curve(std::span<const double> centered, std::span<const double> z_grid) {
  if (centered.size() < 100) throw ParameterError("tail_curve needs at least 100 replicates");
  if (!std::is_sorted(z_grid.begin(), z_grid.end())) throw ParameterError("z grid must be ascending");
  std::vector<double> sorted(centered.begin(), centered.end());
  std::sort(sorted.begin(), sorted.end());
  TailCurve t;
  t.replicates = static_cast<std::int64_t>(sorted.size());
  const double n = static_cast<double>(t.replicates);
  constexpr double q = 1.959963984540054;
  for (double z : z_grid) {
    const auto count = static_cast<std::int64_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), z));
    const double p = static_cast<double>(count) / n;
    const double centre = (p + q * q / (2 * n)) / (1 + q * q / n);
    const double half = q / (1 + q * q / n) * std::sqrt(p * (1 - p) / n + q * q / (4 * n * n));
    t.z_grid.push_back(z);
    t.counts.push_back(count);
    t.survival.push_back(p);
    t.lo.push_back(std::max(0.0, centre - half));
    t.hi.push_back(std::min(1.0, centre + half));
  }
  return t;
}

TailFit fit_tail(const TailCurve& curve, double z_lo, double z_hi, std::int64_t min_count) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < curve.z_grid.size(); ++i) {
    const double z = curve.z_grid[i];
    if (z < z_lo || z > z_hi || z <= 0.0 || curve.counts[i] < min_count) continue;
    xs.push_back(z);
    ys.push_back(std::log(curve.survival[i] / z));
  }
  TailFit fit;
  fit.n_points = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    fit.status = "insufficient_tail_data";
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.status = "ok";
  return fit;
}

double gumbel_cdf(double x, double location, double scale) { return std::exp(-std::exp(-(x - location) / scale)); }

namespace {

GumbelFit gumbel_mle(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= n;
  std::vector<double> y(values.size());
  double var = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = values[i] - mean;
    var += y[i] * y[i];
  }
  var /= n;
  if (!(var > 0.0)) throw NumericalError("gumbel_fit", "sample has zero variance");
  const double ymin = *std::min_element(y.begin(), y.end());

  // beta solves beta = mean(y) - E_w[y], weights w = exp(-y/beta), mean(y) = 0.
  GumbelFit fit;
  double beta = std::sqrt(6.0 * var) / std::numbers::pi;
  for (fit.iterations = 1; fit.iterations <= 200; ++fit.iterations) {
    double sw = 0.0, swy = 0.0, swy2 = 0.0;
    for (double v : y) {
      const double w = std::exp(-(v - ymin) / beta);
      sw += w;
      swy += w * v;
      swy2 += w * v * v;
    }
    const double ew = swy / sw;
    const double varw = std::max(0.0, swy2 / sw - ew * ew);
    const double h = beta + ew;
    const double dh = 1.0 + varw / (beta * beta);
    double next = beta - h / dh;
    if (!(next > 0.0)) next = beta / 2.0;
    const double step = std::abs(next - beta);
    beta = next;
    if (step < 1e-9) {
      double sw2 = 0.0;
      for (double v : y) sw2 += std::exp(-(v - ymin) / beta);
      fit.scale = beta;
      fit.location = mean + ymin - beta * std::log(sw2 / n);
      std::vector<double> sorted(values.begin(), values.end());
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = gumbel_cdf(sorted[i], fit.location, fit.scale);
        fit.ks_distance = std::max({fit.ks_distance, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
      }
      return fit;
    }
  }
  throw NumericalError("gumbel_fit", "Newton iteration did not converge in 200 iterations");
}

}  // namespace

GumbelFit gumbel_fit(std::span<const double> values) {
  if (values.size() < 500) throw ParameterError("gumbel_fit needs at least 500 replicates");
  return gumbel_mle(values);
}

ConditionalGumbel gumbel_fit_by_z_quartile(std::span<const ExtremeSummary> summaries) {
  if (summaries.size() < 8) throw ParameterError("too few replicates for quartile fits");
  std::vector<double> z;
  for (const auto& s : summaries) z.push_back(s.z_stat);
  std::sort(z.begin(), z.end());
  ConditionalGumbel out;
  double lower = -std::numeric_limits<double>::infinity();
  for (int q = 1; q <= 4; ++q) {
    const double upper = q == 4 ? std::numeric_limits<double>::infinity()
                                : z[static_cast<std::size_t>(q * static_cast<double>(z.size()) / 4.0)];
    std::vector<double> group;
    for (const auto& s : summaries)
      if (s.z_stat >= lower && s.z_stat < upper) group.push_back(s.centered);
    out.z_upper.push_back(upper);
    out.sizes.push_back(static_cast<std::int64_t>(group.size()));
    out.fits.push_back(group.size() >= 2 ? gumbel_mle(group) : GumbelFit{});
    lower = upper;
  }
  return out;
}

NearMaxPairs near_max_pairs(const FieldSample& field, std::int64_t L, double c, double centering_scale) {
  if (L < 3) throw ParameterError("near_max_pairs needs L >= 3");
  if (field.side <= L * L) throw ParameterError("near_max_pairs needs N > L^2");
  NearMaxPairs out;
  out.threshold = centering_scale * (m_n(static_cast<double>(field.side), field.dim) -
                                     c * std::log(std::log(static_cast<double>(L))));
  std::vector<Point> high;
  for (Eigen::Index i = 0; i < field.size(); ++i)
    if (field.values[i] >= out.threshold) high.push_back(field.point(i));
  const double far = static_cast<double>(field.side) / static_cast<double>(L);
  for (std::size_t a = 0; a < high.size(); ++a)
    for (std::size_t b = a + 1; b < high.size(); ++b) {
      const double r = norm2(high[a] - high[b]);
      if (r < static_cast<double>(L))
        ++out.count_close;
      else if (r <= far)
        ++out.count_mid;
      else
        ++out.count_far;
    }
  return out;
}

}  // namespace lcgf
