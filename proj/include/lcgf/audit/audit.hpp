#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcgf/env/clusters.hpp"
#include "lcgf/env/environment.hpp"
#include "lcgf/laplace/continuum.hpp"
#include "lcgf/laplace/operator.hpp"

namespace lcgf {

struct ResidualRow {
  Point u;
  Point v;
  double residual = 0.0;
};

struct Exceedance {
  double threshold = 0.0;
  std::int64_t count = 0;
};

struct RateFit {
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int n_points = 0;
};

struct AssumptionReport {
  std::string assumption;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<ResidualRow> residual_grid;
  std::vector<std::pair<double, double>> quantiles;  // (level, value)
  std::vector<Exceedance> exceedance_table;
  std::int64_t qualified_pairs = 0;
  std::optional<RateFit> fit;
  std::string status = "ok";
  /// Additional named series (per-vertex maxima, per-R counts, ...).
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

nlohmann::ordered_json to_json(const AssumptionReport& report);

/// Quantiles at the given levels (linear interpolation between order statistics).
std::vector<std::pair<double, double>> quantiles(std::vector<double> values, std::span<const double> levels);

/// Counts of values >= t for each threshold t.
std::vector<Exceedance> exceedance_table(std::span<const double> values, std::span<const double> thresholds);

/// Q_R(v): the box of side R whose centre is v (lower-middle for even R).
Box centered_box(Point v, std::int64_t R);

// ---------------------------------------------------------------------------

struct CovarianceAuditOptions {
  double delta = 0.125;
  std::int64_t pair_budget = 1000;
  std::uint64_t seed = 0;
};

/// A2: r(u,v) = |2πā G_{V_N}(u*,v*) - log N + log_+ |u-v|| over sampled pairs of
/// V_N^δ. Also checks r(v,v) <= 2πā d_C(v*, ∂+box)/Λ- + |log N| at every source.
AssumptionReport audit_covariance_law(const Environment& env, const ClusterMap& clusters, const Box& box,
                                      double abar, const CovarianceAuditOptions& options = {});

/// g(u,v) = 2πā (G(u*,v*) - K̂_{v*}) from full-plane columns, cached per source.
class FullPlaneG {
 public:
  FullPlaneG(const Environment& env, const ClusterMap& clusters, double abar, double r_min = 4.0,
             double r_max = 32.0, double window_factor = 4.0);
  double operator()(Point u, Point v) const;

 private:
  struct Entry {
    GreenColumn column;
    double k_hat;
  };
  const Environment* env_;
  const ClusterMap* clusters_;
  double abar_, r_min_, r_max_, window_factor_;
  mutable std::mutex mutex_;
  mutable std::map<Point, std::shared_ptr<const Entry>> cache_;
};

struct MicroAuditOptions {
  double delta = 0.25;
  std::int64_t L = 4;
  std::int64_t pair_budget = 500;
  std::uint64_t seed = 0;
};

/// A3: |2πā G(u*,v*) - log N - f((v-w)/N) - g(u,v)| over sampled pairs with |u-v|_inf <= L.
AssumptionReport audit_micro(const Environment& env, const ClusterMap& clusters, const Box& box, double abar,
                             const std::function<double(const Vec2<double>&)>& f_eval,
                             const std::function<double(Point, Point)>& g_eval,
                             const MicroAuditOptions& options = {});

struct MacroAuditOptions {
  double delta = 0.25;
  std::int64_t L = 4;
  std::int64_t pair_budget = 500;
  std::uint64_t seed = 0;
};

/// A4: |2πā G(u*,v*) - h((u-w)/N, (v-w)/N)| over sampled pairs with |u-v|_inf >= N/L.
AssumptionReport audit_macro(const Environment& env, const ClusterMap& clusters, const Box& box, double abar,
                             const MacroAuditOptions& options = {},
                             const std::function<double(const Vec2<double>&, const Vec2<double>&)>& h_eval = {});

struct VarianceTailOptions {
  std::vector<std::int64_t> R_list{64};
  std::vector<double> T_grid;
  std::size_t environments = 200;
  /// Q_R boxes evaluated per environment (tiles per axis).
  std::int64_t tiles_per_axis = 1;
  unsigned threads = 1;
};

/// A1/B1: T̂ = 2πā max_{u in Q_R} G_{Q_R}(u*,u*) - log R over an ensemble of
/// environments generated from `base` with seeds base.seed + k.
AssumptionReport audit_variance_tail(const EnvironmentParams& base, double abar,
                                     const VarianceTailOptions& options);

/// max over proxy ∩ box of G_box(u,u), and the violations of G(u,u) <= d_C(u, ∂+box)/Λ-.
struct CeilingCheck {
  std::int64_t vertices = 0;
  std::int64_t violations = 0;
  double max_ratio = 0.0;  // max G(u,u) Λ- / d_C
  double max_diagonal = 0.0;
};
CeilingCheck chemical_ceiling_check(const Environment& env, const ClusterMap& clusters, const Box& box);

struct SparsityOptions {
  std::int64_t N = 128;
  std::int64_t L = 4;
  std::vector<std::int64_t> R_grid{1, 2, 4, 8, 16, 32};
  std::size_t environments = 4;
  std::int64_t samples_per_subbox = 4;
  double fit_r_max = 32.0;
  double window_factor = 4.0;
  unsigned threads = 1;
};

/// B2: per sub-box fraction of sampled vertices with R̂^(1) > R, for each R.
AssumptionReport audit_sparsity_r1(const EnvironmentParams& base, const SparsityOptions& options);

// ---------------------------------------------------------------------------

struct LevelSetProfile {
  Point source;
  std::vector<double> theta;                 // theta[k-1] = θ(k)
  std::vector<std::int64_t> set_sizes;       // |A_k|
  std::vector<std::int64_t> boundary_sizes;  // |∂+A_k| within the proxy
  std::vector<Point> order;                  // vertex added at step k
};

/// Greedy level sets: A_1 = {u}; A_{k+1} adds the boundary vertex with the
/// largest Green value (ties: lexicographically smallest).
LevelSetProfile level_set_profile(const GreenColumn& column, const ClusterMap& clusters, Point u,
                                  std::int64_t max_k = 0);

nlohmann::ordered_json to_json(const LevelSetProfile& profile);

}  // namespace lcgf
