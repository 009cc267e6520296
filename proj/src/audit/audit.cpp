#include "lcgf/audit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lcgf/errors.hpp"
#include "lcgf/laplace/diffusivity.hpp"
#include "lcgf/parallel.hpp"
#include "lcgf/rng.hpp"

namespace lcgf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const std::vector<double> kQuantileLevels{0.5, 0.9, 0.95, 0.99, 1.0};
const std::vector<double> kResidualThresholds{0.25, 0.5, 1.0, 2.0, 3.0, 5.0};

double log_plus(double r) { return r > 1.0 ? std::log(r) : 0.0; }

Point random_vertex(std::span<const Point> vertices, CounterStream& rng) {
  const auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(vertices.size()));
  return vertices[std::min(i, vertices.size() - 1)];
}

std::vector<Point> inner_vertices_or_throw(const Box& box, double delta) {
  auto inner = Box{box.corner, box.side, delta}.inner_vertices();
  if (inner.empty()) throw ParameterError("V_N^delta is empty");
  return inner;
}

nlohmann::ordered_json point_json(Point p) { return nlohmann::ordered_json::array({p.x, p.y}); }

void summarize(AssumptionReport& report, std::span<const double> thresholds) {
  std::vector<double> values;
  values.reserve(report.residual_grid.size());
  for (const auto& row : report.residual_grid) values.push_back(row.residual);
  report.qualified_pairs = static_cast<std::int64_t>(values.size());
  report.quantiles = quantiles(values, kQuantileLevels);
  report.exceedance_table = exceedance_table(values, thresholds);
}

// Least squares of log survival on T over points with 0 < survival < 1 and at
// least `min_count` exceedances.
void fit_rate(AssumptionReport& report, std::span<const double> grid, std::span<const double> survival,
              std::span<const std::int64_t> counts, std::int64_t min_count = 10) {
  std::vector<double> xs, ys;
  bool any_partial = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (survival[i] >= 1.0 || counts[i] == 0) continue;
    any_partial = true;
    if (counts[i] < min_count) continue;
    xs.push_back(grid[i]);
    ys.push_back(std::log(survival[i]));
  }
  if (!any_partial) {
    report.status = "no_exceedances";
    return;
  }
  if (xs.size() < 2) {
    report.status = "insufficient_tail_data";
    return;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sse += std::pow(ys[i] - my - slope * (xs[i] - mx), 2);
  const double se = xs.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  RateFit fit;
  fit.rate = -slope;
  fit.ci_lo = fit.rate - 1.96 * se;
  fit.ci_hi = fit.rate + 1.96 * se;
  fit.n_points = static_cast<int>(xs.size());
  report.fit = fit;
  report.status = "ok";
}

}  // namespace

std::vector<std::pair<double, double>> quantiles(std::vector<double> values, std::span<const double> levels) {
  std::vector<std::pair<double, double>> out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  for (double q : levels) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    out.emplace_back(q, values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]));
  }
  return out;
}

std::vector<Exceedance> exceedance_table(std::span<const double> values, std::span<const double> thresholds) {
  std::vector<Exceedance> out;
  for (double t : thresholds)
    out.push_back({t, static_cast<std::int64_t>(std::count_if(values.begin(), values.end(),
                                                              [t](double v) { return v >= t; }))});
  return out;
}

Box centered_box(Point v, std::int64_t R) {
  if (R < 1) throw ParameterError("box side must be positive");
  return Box{{v.x - R / 2, v.y - R / 2}, R};
}

nlohmann::ordered_json to_json(const AssumptionReport& report) {
  nlohmann::ordered_json j;
  j["assumption"] = report.assumption;
  j["config"] = report.config;
  j["qualified_pairs"] = report.qualified_pairs;
  auto& q = j["quantiles"] = nlohmann::ordered_json::object();
  for (const auto& [level, value] : report.quantiles) q[std::to_string(level).substr(0, 4)] = value;
  auto& table = j["exceedance_table"] = nlohmann::ordered_json::array();
  for (const auto& e : report.exceedance_table) table.push_back({{"threshold", e.threshold}, {"count", e.count}});
  if (report.fit)
    j["fit"] = {{"rate", report.fit->rate},
                {"ci", {report.fit->ci_lo, report.fit->ci_hi}},
                {"n_points", report.fit->n_points}};
  else
    j["fit"] = nullptr;
  j["status"] = report.status;
  for (const auto& [key, value] : report.extra.items()) j[key] = value;
  return j;
}

// ---------------------------------------------------------------------------

AssumptionReport audit_covariance_law(const Environment& env, const ClusterMap& clusters, const Box& box,
                                      double abar, const CovarianceAuditOptions& options) {
  if (options.pair_budget < 100) throw ParameterError("pair_budget must be at least 100");
  if (!(abar > 0.0)) throw ParameterError("abar must be positive");
  const auto inner = inner_vertices_or_throw(box, options.delta);
  const GreenOperator op(env, clusters, box.rect());
  const auto chem = chemical_distances_to_boundary(env, clusters, box);
  const double log_n = std::log(static_cast<double>(box.side));
  const double lambda_minus = env.params().lambda_minus;

  AssumptionReport report;
  report.assumption = "A2";
  report.config = {{"corner", point_json(box.corner)}, {"N", box.side}, {"abar", abar},
                   {"delta", options.delta},           {"pair_budget", options.pair_budget},
                   {"seed", options.seed}};

  CounterStream rng(stream_id(options.seed, 0, StreamTag::audit));
  const std::int64_t partners = 20;
  const std::int64_t sources = std::max<std::int64_t>(1, options.pair_budget / partners);
  std::map<Point, double> vertex_max;
  std::int64_t ceiling_checked = 0;
  std::int64_t ceiling_violations = 0;
  for (std::int64_t s = 0; s < sources; ++s) {
    const Point v = random_vertex(inner, rng);
    const Point vs = clusters.projection(v);
    GreenColumn column;
    if (op.index().contains(vs)) {
      column = op.column(vs);
    } else {
      column.source = vs;
      column.index = op.shared_index();
      column.values = Eigen::VectorXd::Zero(op.size());
    }
    auto record = [&](Point u, Point w, double r) {
      report.residual_grid.push_back({u, w, r});
      vertex_max[u] = std::max(vertex_max[u], r);
      vertex_max[w] = std::max(vertex_max[w], r);
    };
    const double diag = kTwoPi * abar * column.value(vs);
    const double r_diag = std::abs(diag - log_n);
    record(v, v, r_diag);
    if (box.contains(vs)) {
      const std::int64_t d = chem[static_cast<std::size_t>(box.rect().index(vs))];
      if (d >= 0) {
        ++ceiling_checked;
        if (r_diag > kTwoPi * abar * static_cast<double>(d) / lambda_minus + std::abs(log_n) + 1e-9)
          ++ceiling_violations;
      }
    }
    for (std::int64_t k = 0; k < partners; ++k) {
      const Point u = random_vertex(inner, rng);
      const double g = column.value(clusters.projection(u));
      record(u, v, std::abs(kTwoPi * abar * g - log_n + log_plus(norm2(u - v))));
    }
  }
  summarize(report, kResidualThresholds);
  auto& per_vertex = report.extra["per_vertex_max"] = nlohmann::ordered_json::array();
  for (const auto& [p, r] : vertex_max) per_vertex.push_back({{"x", p.x}, {"y", p.y}, {"max_residual", r}});
  report.extra["ceiling"] = {{"checked", ceiling_checked}, {"violations", ceiling_violations}};
  return report;
}

FullPlaneG::FullPlaneG(const Environment& env, const ClusterMap& clusters, double abar, double r_min, double r_max,
                       double window_factor)
    : env_(&env), clusters_(&clusters), abar_(abar), r_min_(r_min), r_max_(r_max), window_factor_(window_factor) {}

double FullPlaneG::operator()(Point u, Point v) const {
  const Point vs = clusters_->projection(v);
  std::shared_ptr<const Entry> entry;
  {
    std::lock_guard lock(mutex_);
    auto& slot = cache_[vs];
    if (!slot) {
      GreenColumn column = green_fullplane_approx(*env_, *clusters_, vs, static_cast<std::int64_t>(std::ceil(r_max_)),
                                                  window_factor_);
      const double k_hat = fit_diffusivity(column, vs, r_min_, r_max_).k_hat;
      slot = std::make_shared<const Entry>(Entry{std::move(column), k_hat});
    }
    entry = slot;
  }
  return kTwoPi * abar_ * (entry->column.value(clusters_->projection(u)) - entry->k_hat);
}

AssumptionReport audit_micro(const Environment& env, const ClusterMap& clusters, const Box& box, double abar,
                             const std::function<double(const Vec2<double>&)>& f_eval,
                             const std::function<double(Point, Point)>& g_eval, const MicroAuditOptions& options) {
  if (options.L < 0) throw ParameterError("L must be non-negative");
  if (!f_eval || !g_eval) throw ParameterError("audit_micro needs f and g");
  const auto inner = inner_vertices_or_throw(box, options.delta);
  const Box inner_box{box.corner, box.side, options.delta};
  const GreenOperator op(env, clusters, box.rect());
  const double n = static_cast<double>(box.side);
  const double log_n = std::log(n);

  AssumptionReport report;
  report.assumption = "A3";
  report.config = {{"corner", point_json(box.corner)}, {"N", box.side}, {"abar", abar}, {"delta", options.delta},
                   {"L", options.L}, {"pair_budget", options.pair_budget}, {"seed", options.seed}};
  CounterStream rng(stream_id(options.seed, 0, StreamTag::audit));
  const std::int64_t partners = 10;
  const std::int64_t sources = std::max<std::int64_t>(1, options.pair_budget / partners);
  const std::int64_t width = 2 * options.L + 1;
  for (std::int64_t s = 0; s < sources; ++s) {
    const Point v = random_vertex(inner, rng);
    const Point vs = clusters.projection(v);
    const bool solvable = op.index().contains(vs);
    const GreenColumn column = solvable ? op.column(vs) : GreenColumn{};
    const Vec2<double> x((v.x - box.corner.x) / n, (v.y - box.corner.y) / n);
    const double fv = f_eval(x);
    for (std::int64_t k = 0; k < partners; ++k) {
      Point u;
      do {
        const auto dx = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(width)) - options.L;
        const auto dy = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(width)) - options.L;
        u = v + Point{dx, dy};
      } while (!inner_box.in_inner(u));
      const double g = solvable ? column.value(clusters.projection(u)) : 0.0;
      report.residual_grid.push_back({u, v, std::abs(kTwoPi * abar * g - log_n - fv - g_eval(u, v))});
    }
  }
  summarize(report, kResidualThresholds);
  return report;
}

AssumptionReport audit_macro(const Environment& env, const ClusterMap& clusters, const Box& box, double abar,
                             const MacroAuditOptions& options,
                             const std::function<double(const Vec2<double>&, const Vec2<double>&)>& h_eval) {
  if (options.L < 1) throw ParameterError("L must be positive");
  const auto inner = inner_vertices_or_throw(box, options.delta);
  const GreenOperator op(env, clusters, box.rect());
  const double n = static_cast<double>(box.side);
  const std::int64_t min_sep = (box.side + options.L - 1) / options.L;
  auto h = h_eval ? h_eval : [](const Vec2<double>& a, const Vec2<double>& b) { return regular_part_h<double>(a, b); };

  AssumptionReport report;
  report.assumption = "A4";
  report.config = {{"corner", point_json(box.corner)}, {"N", box.side}, {"abar", abar}, {"delta", options.delta},
                   {"L", options.L}, {"pair_budget", options.pair_budget}, {"seed", options.seed}};
  CounterStream rng(stream_id(options.seed, 0, StreamTag::audit));
  const std::int64_t partners = 10;
  const std::int64_t sources = std::max<std::int64_t>(1, options.pair_budget / partners);
  for (std::int64_t s = 0; s < sources; ++s) {
    const Point v = random_vertex(inner, rng);
    std::vector<Point> far;
    for (Point u : inner)
      if (box.side % options.L == 0 ? norm_inf(u - v) * options.L >= box.side : norm_inf(u - v) >= min_sep)
        far.push_back(u);
    if (far.empty()) continue;
    const Point vs = clusters.projection(v);
    const bool solvable = op.index().contains(vs);
    const GreenColumn column = solvable ? op.column(vs) : GreenColumn{};
    const Vec2<double> y((v.x - box.corner.x) / n, (v.y - box.corner.y) / n);
    for (std::int64_t k = 0; k < partners; ++k) {
      const Point u = random_vertex(far, rng);
      const Vec2<double> x((u.x - box.corner.x) / n, (u.y - box.corner.y) / n);
      const double g = solvable ? column.value(clusters.projection(u)) : 0.0;
      report.residual_grid.push_back({u, v, std::abs(kTwoPi * abar * g - h(x, y))});
    }
  }
  summarize(report, kResidualThresholds);
  return report;
}

CeilingCheck chemical_ceiling_check(const Environment& env, const ClusterMap& clusters, const Box& box) {
  const GreenOperator op(env, clusters, box.rect());
  const Eigen::VectorXd diag = green_diagonal(op);
  const auto chem = chemical_distances_to_boundary(env, clusters, box);
  const double lambda_minus = env.params().lambda_minus;
  CeilingCheck out;
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    const Point u = op.index().vertex(i);
    const std::int64_t d = chem[static_cast<std::size_t>(box.rect().index(u))];
    ++out.vertices;
    out.max_diagonal = std::max(out.max_diagonal, diag[i]);
    if (d < 0) {
      ++out.violations;
      continue;
    }
    const double ratio = diag[i] * lambda_minus / static_cast<double>(d);
    out.max_ratio = std::max(out.max_ratio, ratio);
    if (diag[i] > static_cast<double>(d) / lambda_minus + 1e-9) ++out.violations;
  }
  return out;
}

AssumptionReport audit_variance_tail(const EnvironmentParams& base, double abar, const VarianceTailOptions& options) {
  if (options.environments < 200) throw ParameterError("audit_variance_tail needs at least 200 environments per R");
  if (options.R_list.empty()) throw ParameterError("R list is empty");
  if (options.tiles_per_axis < 1) throw ParameterError("tiles_per_axis must be positive");
  std::vector<double> grid = options.T_grid;
  if (grid.empty())
    for (int i = 0; i <= 24; ++i) grid.push_back(0.25 * i);
  std::sort(grid.begin(), grid.end());

  AssumptionReport report;
  report.assumption = "B1";
  report.config = {{"p", base.p},
                   {"lambda_minus", base.lambda_minus},
                   {"lambda_plus", base.lambda_plus},
                   {"law", to_string(base.law)},
                   {"seed", base.seed},
                   {"abar", abar},
                   {"R_list", options.R_list},
                   {"environments", options.environments},
                   {"tiles_per_axis", options.tiles_per_axis},
                   {"T_grid", grid}};
  auto& per_r = report.extra["per_R"] = nlohmann::ordered_json::array();
  std::string overall = "ok";
  const std::int64_t t = options.tiles_per_axis;
  for (std::int64_t R : options.R_list) {
    std::vector<std::vector<double>> t_hat(options.environments);
    parallel_for(options.environments, options.threads, [&](std::size_t k) {
      EnvironmentParams params = base;
      params.origin = {0, 0};
      params.width = params.height = (t + 2) * R;
      params.seed = base.seed + k;
      const Environment env = generate_environment(params);
      const ClusterMap clusters = label_clusters(env);
      for (std::int64_t a = 0; a < t * t; ++a) {
        const Box box{{R + (a % t) * R, R + (a / t) * R}, R};
        double value = -std::numeric_limits<double>::infinity();
        try {
          const GreenOperator op(env, clusters, box.rect());
          value = kTwoPi * abar * green_diagonal(op).maxCoeff() - std::log(static_cast<double>(R));
        } catch (const ParameterError&) {
        }
        t_hat[k].push_back(value);
      }
    });
    std::vector<double> pooled;
    for (const auto& v : t_hat) pooled.insert(pooled.end(), v.begin(), v.end());
    const auto table = exceedance_table(pooled, grid);
    std::vector<double> survival;
    std::vector<std::int64_t> counts;
    for (const auto& e : table) {
      counts.push_back(e.count);
      survival.push_back(static_cast<double>(e.count) / static_cast<double>(pooled.size()));
    }
    AssumptionReport sub;
    fit_rate(sub, grid, survival, counts);
    nlohmann::ordered_json entry;
    entry["R"] = R;
    entry["boxes"] = pooled.size();
    entry["max_T_hat"] = *std::max_element(pooled.begin(), pooled.end());
    double prob_one = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (survival[i] >= 1.0) prob_one = grid[i];
    entry["probability_one_up_to"] = std::isfinite(prob_one) ? nlohmann::ordered_json(prob_one) : nullptr;
    auto& rows = entry["exceedance"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double per_box = 0.0;
      for (const auto& v : t_hat)
        per_box += static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x >= grid[i]; }));
      per_box /= static_cast<double>(t_hat.size());
      rows.push_back({{"T", grid[i]}, {"count", counts[i]}, {"probability", survival[i]},
                      {"mean_per_environment", per_box}});
    }
    if (sub.fit)
      entry["fit"] = {{"rate", sub.fit->rate}, {"ci", {sub.fit->ci_lo, sub.fit->ci_hi}},
                      {"n_points", sub.fit->n_points}, {"meets_2_plus_eps", sub.fit->ci_lo > 2.0}};
    else
      entry["fit"] = nullptr;
    entry["status"] = sub.status;
    per_r.push_back(entry);
    if (overall == "ok" && sub.status != "ok") overall = sub.status;
    if (R == options.R_list.front()) {
      report.exceedance_table = table;
      report.fit = sub.fit;
      report.quantiles = quantiles(pooled, kQuantileLevels);
      report.qualified_pairs = static_cast<std::int64_t>(pooled.size());
    }
  }
  report.status = overall;
  return report;
}

AssumptionReport audit_sparsity_r1(const EnvironmentParams& base, const SparsityOptions& options) {
  if (options.L < 1 || options.N / options.L < 1) throw ParameterError("need 1 <= L <= N");
  if (options.samples_per_subbox < 1) throw ParameterError("samples_per_subbox must be positive");
  if (options.environments < 1) throw ParameterError("need at least one environment");
  std::vector<std::int64_t> r_grid = options.R_grid;
  std::sort(r_grid.begin(), r_grid.end());
  const Box box{{0, 0}, options.N};
  const std::int64_t sub = options.N / options.L;
  const auto corners = tiling_corners(box, sub);
  const std::int64_t margin =
      fullplane_window({0, 0}, static_cast<std::int64_t>(std::ceil(options.fit_r_max)), options.window_factor)
          .width / 2 + 2;

  // fraction[k][tile][r]
  std::vector<std::vector<std::vector<double>>> fraction(options.environments);
  parallel_for(options.environments, options.threads, [&](std::size_t k) {
    EnvironmentParams params = base;
    params.origin = {-margin, -margin};
    params.width = params.height = options.N + 2 * margin;
    params.seed = base.seed + k;
    const Environment env = generate_environment(params);
    const ClusterMap clusters = label_clusters(env);
    CounterStream rng(stream_id(params.seed, k, StreamTag::audit));
    for (Point c : corners) {
      std::vector<double> radii;
      for (std::int64_t s = 0; s < options.samples_per_subbox; ++s) {
        const Point v{c.x + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(sub)),
                      c.y + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(sub))};
        const Point vs = clusters.projection(v);
        double r1 = std::numeric_limits<double>::infinity();
        try {
          const GreenColumn column = green_fullplane_approx(
              env, clusters, vs, static_cast<std::int64_t>(std::ceil(options.fit_r_max)), options.window_factor);
          if (const auto r = validity_radius(column, vs, options.fit_r_max)) r1 = static_cast<double>(*r);
        } catch (const ParameterError&) {
        }
        radii.push_back(r1);
      }
      std::vector<double> row;
      for (std::int64_t R : r_grid)
        row.push_back(static_cast<double>(std::count_if(radii.begin(), radii.end(),
                                                        [&](double r) { return r > static_cast<double>(R); })) /
                      static_cast<double>(radii.size()));
      fraction[k].push_back(std::move(row));
    }
  });

  AssumptionReport report;
  report.assumption = "B2";
  report.config = {{"p", base.p},           {"lambda_minus", base.lambda_minus}, {"lambda_plus", base.lambda_plus},
                   {"seed", base.seed},     {"N", options.N},                    {"L", options.L},
                   {"R_grid", r_grid},      {"environments", options.environments},
                   {"samples_per_subbox", options.samples_per_subbox},           {"fit_r_max", options.fit_r_max},
                   {"window_factor", options.window_factor}};
  auto& rows = report.extra["normalized_counts"] = nlohmann::ordered_json::array();
  bool monotone = true;
  for (const auto& env_rows : fraction)
    for (const auto& tile : env_rows)
      for (std::size_t i = 1; i < tile.size(); ++i) monotone = monotone && tile[i] <= tile[i - 1];
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    double mean = 0.0, max = 0.0;
    std::int64_t n = 0;
    for (const auto& env_rows : fraction)
      for (const auto& tile : env_rows) {
        mean += tile[i];
        max = std::max(max, tile[i]);
        ++n;
      }
    mean /= static_cast<double>(n);
    rows.push_back({{"R", r_grid[i]}, {"mean", mean}, {"max", max}});
    report.exceedance_table.push_back({static_cast<double>(r_grid[i]),
                                       static_cast<std::int64_t>(std::llround(mean * static_cast<double>(n) *
                                                                             options.samples_per_subbox))});
  }
  report.extra["non_increasing"] = monotone;
  report.qualified_pairs = static_cast<std::int64_t>(options.environments * corners.size()) * options.samples_per_subbox;
  return report;
}

}  // namespace lcgf
