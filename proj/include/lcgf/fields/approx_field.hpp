#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "lcgf/env/clusters.hpp"
#include "lcgf/env/environment.hpp"
#include "lcgf/fields/field_sample.hpp"
#include "lcgf/laplace/continuum.hpp"
#include "lcgf/rng.hpp"

namespace lcgf {

/// Draws side^2 values (row-major) of a field on V_side(corner).
using BoxSampler = std::function<Eigen::VectorXd(Point corner, std::int64_t side, CounterStream& rng)>;

struct ApproxFieldConfig {
  std::int64_t N = 1;
  std::int64_t K = 1, L = 1;              // J = K L
  std::int64_t K_prime = 1, L_prime = 1;  // J' = K' L'
  double R = 0.0;
  double delta = 0.0;
  double gamma = 0.0;        // Γ
  double gamma_prime = 0.0;  // Γ'_{R,δ}
  std::function<double(const Vec2<double>&)> f_eval;
  std::function<double(Point, Point)> g_eval;
  std::function<double(const Vec2<double>&, const Vec2<double>&)> h_eval;
  /// R^(1) at a vertex of V_J; vertices with R^(1) > R get b^mac = 0. Defaults to 0.
  std::function<double(Point)> r1_eval;
  /// Overrides s_{N/J,J'} when set.
  std::optional<double> s_correction;

  std::int64_t J() const { return K * L; }
  std::int64_t J_prime() const { return K_prime * L_prime; }
  std::int64_t macro_side() const { return N / J(); }
  /// N* / (J J') = floor(N / (J J')).
  std::int64_t meso_side() const { return N / (J() * J_prime()); }
  std::int64_t N_star() const { return J() * J_prime() * meso_side(); }
  /// Smallest power of two >= N*/(J J').
  std::int64_t I() const;
  /// log(N*/JJ') / log I (1 when I = 1), unless overridden.
  double s() const;
  void validate() const;
};

/// Component fields of one draw, each on V_N(0) (row-major).
struct ApproxComponents {
  Eigen::VectorXd mac, mac_correction, mes, mic, mic_correction;
};

class ApproxFieldModel {
 public:
  ApproxFieldModel(ApproxFieldConfig config, BoxSampler macro, BoxSampler micro);

  const ApproxFieldConfig& config() const noexcept { return config_; }
  /// b^mic on V_{J'}(0), evaluated as sqrt(Γ - f((u+1)/(J'+1))).
  const Eigen::VectorXd& b_mic() const noexcept { return b_mic_; }
  /// b̂^mac on V_J.
  const Eigen::VectorXd& b_mac() const noexcept { return b_mac_; }

  /// ξ on the micro boxes of the macro boxes with preimage in V_J, 0 elsewhere.
  FieldSample sample(std::uint64_t master_seed, std::uint64_t replicate,
                     ApproxComponents* components = nullptr) const;

 private:
  ApproxFieldConfig config_;
  BoxSampler macro_;
  BoxSampler micro_;
  Eigen::VectorXd b_mic_;
  Eigen::VectorXd b_mac_;
};

FieldSample sample_approx_field(const ApproxFieldConfig& config, const BoxSampler& macro, const BoxSampler& micro,
                                std::uint64_t master_seed, std::uint64_t replicate,
                                ApproxComponents* components = nullptr);

/// Extended GFF sampler on boxes of one environment, scaled by `scaling`.
/// Operators are built on first use per (corner, side) and cached.
BoxSampler make_gff_box_sampler(const Environment& env, const ClusterMap& clusters, double scaling);

/// max of f over the centers of a grid x grid partition of (delta, 1-delta)^2.
double max_f_on_grid(int grid = 256, double delta = 0.0);

/// Γ default: max of f over a 256^2 grid plus 1e-3.
double default_gamma();

}  // namespace lcgf
