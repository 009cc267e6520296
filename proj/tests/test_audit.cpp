#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lcgf/audit/audit.hpp"
#include "lcgf/errors.hpp"
#include "oracles.hpp"

using namespace lcgf;

namespace {

Environment perc_env(std::int64_t n, double p, std::uint64_t seed) {
  EnvironmentParams e;
  e.width = e.height = n;
  e.p = p;
  e.seed = seed;
  return generate_environment(e);
}

}  // namespace

TEST_CASE("quantiles and exceedance table") {
  std::vector<double> v{4, 1, 3, 2, 5};
  const std::vector<double> levels{0.0, 0.5, 0.9, 1.0};
  const auto q = quantiles(v, levels);
  CHECK(q[0].second == 1.0);
  CHECK(q[1].second == 3.0);
  CHECK(q[2].second == doctest::Approx(4.6));
  CHECK(q[3].second == 5.0);
  const std::vector<double> t{0.0, 2.5, 5.0, 6.0};
  const auto e = exceedance_table(v, t);
  CHECK(e[0].count == 5);
  CHECK(e[1].count == 3);
  CHECK(e[2].count == 1);
  CHECK(e[3].count == 0);
}

TEST_CASE("centred boxes") {
  CHECK(centered_box({10, 10}, 5).corner == Point{8, 8});
  CHECK(centered_box({10, 10}, 4).corner == Point{8, 8});
  CHECK(centered_box({10, 10}, 4).contains({10, 10}));
  CHECK_THROWS_AS(centered_box({0, 0}, 0), ParameterError);
}

TEST_CASE("A2 rejects a small pair budget") {
  const Environment env = oracle::unit_env(20, 20);
  const ClusterMap c = label_clusters(env);
  CovarianceAuditOptions o;
  o.pair_budget = 99;
  CHECK_THROWS_AS(audit_covariance_law(env, c, Box{{2, 2}, 16}, 1.0, o), ParameterError);
}

TEST_CASE("A2 on the full lattice: diagonal residual, counts and ceiling") {
  const Environment env = oracle::unit_env(34, 34);
  const ClusterMap c = label_clusters(env);
  const Box box{{1, 1}, 32};
  CovarianceAuditOptions o;
  o.pair_budget = 200;
  o.seed = 3;
  const AssumptionReport r = audit_covariance_law(env, c, box, 1.0, o);
  CHECK(r.assumption == "A2");
  CHECK(r.qualified_pairs == static_cast<std::int64_t>(r.residual_grid.size()));
  CHECK(r.qualified_pairs == 10 * 21);

  // diagonal rows: |2π G(v,v) - log N| with G from an independent FD solve
  std::vector<Point> dom;
  for (std::int64_t y = 1; y <= 32; ++y)
    for (std::int64_t x = 1; x <= 32; ++x) dom.push_back({x, y});
  int diagonal_rows = 0;
  for (const auto& row : r.residual_grid) {
    CHECK(row.residual >= 0.0);
    if (row.u != row.v) continue;
    ++diagonal_rows;
    const auto i = static_cast<int>(row.v.x), j = static_cast<int>(row.v.y);
    const Eigen::VectorXd g = oracle::fd_square_green(33, i, j);
    const double expected = std::abs(2 * std::numbers::pi * g[oracle::fd_index(33, i, j)] -
                                     std::log(32.0));
    CHECK(row.residual == doctest::Approx(expected).epsilon(1e-8));
  }
  CHECK(diagonal_rows == 10);

  for (std::size_t i = 1; i < r.exceedance_table.size(); ++i)
    CHECK(r.exceedance_table[i].count <= r.exceedance_table[i - 1].count);
  for (std::size_t i = 1; i < r.quantiles.size(); ++i) CHECK(r.quantiles[i].second >= r.quantiles[i - 1].second);
  CHECK(r.extra["ceiling"]["checked"].get<int>() == 10);
  CHECK(r.extra["ceiling"]["violations"].get<int>() == 0);

  const auto j = to_json(r);
  for (const char* key : {"assumption", "config", "qualified_pairs", "quantiles", "exceedance_table", "fit",
                          "status", "per_vertex_max", "ceiling"})
    CHECK(j.contains(key));
  CHECK(j["quantiles"].contains("0.95"));
}

TEST_CASE("A2 residuals are symmetric in the pair") {
  const Environment env = perc_env(30, 0.8, 5);
  const ClusterMap c = label_clusters(env);
  const Box box{{1, 1}, 28};
  const GreenOperator op(env, c, box.rect());
  const AssumptionReport r = audit_covariance_law(env, c, box, 0.8, {0.125, 200, 11});
  for (const auto& row : r.residual_grid) {
    const Point us = c.projection(row.u), vs = c.projection(row.v);
    if (!op.index().contains(us) || !op.index().contains(vs)) continue;
    const double guv = op.column(vs).value(us);
    const double gvu = op.column(us).value(vs);
    CHECK(guv == doctest::Approx(gvu).epsilon(1e-9));
  }
}

TEST_CASE("chemical ceiling holds for Dirichlet diagonals") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Environment env = perc_env(26, 0.7, seed);
    const ClusterMap c = label_clusters(env);
    const CeilingCheck chk = chemical_ceiling_check(env, c, Box{{1, 1}, 24});
    CHECK(chk.vertices > 0);
    CHECK(chk.violations == 0);
    CHECK(chk.max_ratio <= 1.0 + 1e-9);
  }
}

TEST_CASE("A3 and A4 run with supplied kernels") {
  const Environment env = oracle::unit_env(34, 34);
  const ClusterMap c = label_clusters(env);
  const Box box{{1, 1}, 32};
  MicroAuditOptions mo;
  mo.pair_budget = 100;
  const auto zero_f = [](const Vec2<double>&) { return 0.0; };
  const auto zero_g = [](Point, Point) { return 0.0; };
  const AssumptionReport a3 = audit_micro(env, c, box, 1.0, zero_f, zero_g, mo);
  CHECK(a3.assumption == "A3");
  CHECK(a3.qualified_pairs > 0);
  for (const auto& row : a3.residual_grid) {
    CHECK(std::max(std::abs(row.u.x - row.v.x), std::abs(row.u.y - row.v.y)) <= mo.L);
    CHECK(Box{box.corner, box.side, mo.delta}.in_inner(row.u));
  }

  MacroAuditOptions ma;
  ma.pair_budget = 100;
  const AssumptionReport a4 = audit_macro(env, c, box, 1.0, ma);
  CHECK(a4.assumption == "A4");
  CHECK(a4.qualified_pairs > 0);
  for (const auto& row : a4.residual_grid)
    CHECK(std::max(std::abs(row.u.x - row.v.x), std::abs(row.u.y - row.v.y)) >= box.side / ma.L);
  // the continuum kernel is accurate far from the pole on the full lattice
  CHECK(a4.quantiles.back().second < 0.5);
}

TEST_CASE("level sets: monotone thresholds and exact boundaries") {
  const Environment env = perc_env(22, 0.75, 9);
  const ClusterMap c = label_clusters(env);
  const GreenOperator op(env, c, Rect{{1, 1}, 20, 20});
  const Point u = op.index().vertex(op.size() / 2);
  const GreenColumn col = op.column(u);
  const LevelSetProfile prof = level_set_profile(col, c, u);
  CHECK(prof.theta[0] == col.value(u));
  CHECK(static_cast<Eigen::Index>(prof.order.size()) == op.size());
  std::vector<Point> set;
  for (std::size_t k = 0; k < prof.order.size(); ++k) {
    set.push_back(prof.order[k]);
    CHECK(prof.set_sizes[k] == static_cast<std::int64_t>(k + 1));
    if (k) CHECK(prof.theta[k] <= prof.theta[k - 1]);
    if (k % 17 == 0)
      CHECK(prof.boundary_sizes[k] == static_cast<std::int64_t>(outer_boundary_in_cluster(c, set).size()));
  }
  const auto j = to_json(prof);
  CHECK(j["theta"].size() == prof.theta.size());
}

TEST_CASE("level sets on the full lattice decay slowly") {
  const Environment env = oracle::unit_env(66, 66);
  const ClusterMap c = label_clusters(env);
  const GreenOperator op(env, c, Rect{{1, 1}, 64, 64});
  const Point u{32, 32};
  const LevelSetProfile prof = level_set_profile(op.column(u), c, u);
  for (std::size_t k = 64; 2 * k <= prof.theta.size(); ++k) CHECK(prof.theta[k - 1] - prof.theta[2 * k - 1] <= 10.0);
}

TEST_CASE("variance tail on the full lattice has no exceedances") {
  EnvironmentParams base;
  VarianceTailOptions o;
  o.environments = 199;
  CHECK_THROWS_AS(audit_variance_tail(base, 1.0, o), ParameterError);
  o.environments = 200;
  o.R_list = {16};
  const AssumptionReport r = audit_variance_tail(base, 1.0, o);
  CHECK(r.status == "no_exceedances");
  CHECK(!r.fit.has_value());
  CHECK(r.qualified_pairs == 200);
  // every environment is the same deterministic box
  CHECK(r.quantiles.front().second == r.quantiles.back().second);
  CHECK(r.extra["per_R"][0]["probability_one_up_to"].is_number());
}

TEST_CASE("sparsity counts are non-increasing in R") {
  EnvironmentParams base;
  base.p = 0.9;
  base.seed = 4;
  SparsityOptions o;
  o.N = 32;
  o.L = 2;
  o.environments = 2;
  o.samples_per_subbox = 3;
  o.fit_r_max = 16;
  o.R_grid = {1, 2, 4, 8, 16};
  const AssumptionReport r = audit_sparsity_r1(base, o);
  CHECK(r.extra["non_increasing"].get<bool>());
  CHECK(r.qualified_pairs == 2 * 4 * 3);
  const auto& rows = r.extra["normalized_counts"];
  CHECK(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i]["mean"].get<double>() <= rows[i - 1]["mean"].get<double>());
}
