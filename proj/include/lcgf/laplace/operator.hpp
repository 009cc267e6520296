#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "lcgf/env/clusters.hpp"
#include "lcgf/env/environment.hpp"
#include "lcgf/lattice.hpp"

namespace lcgf {

enum class SolveMode { automatic, direct, iterative };

/// Systems up to this many unknowns are factorized directly.
inline constexpr std::int64_t kDirectSolveLimit = 262144;

struct IterativeOptions {
  double tolerance = 1e-10;
  int max_iterations = 20000;
};

using SparseMatrix = Eigen::SparseMatrix<double>;
using Factorization = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower>;

/// Bijection between the proxy-cluster vertices of a rectangular region and
/// solver indices (row-major order).
class VertexIndex {
 public:
  VertexIndex(const ClusterMap& clusters, Rect region);

  const Rect& region() const noexcept { return region_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(vertices_.size()); }
  /// Solver index of p, or -1 if p is not a proxy vertex of the region.
  Eigen::Index operator[](Point p) const {
    return region_.contains(p) ? slot_[static_cast<std::size_t>(region_.index(p))] : -1;
  }
  bool contains(Point p) const { return (*this)[p] >= 0; }
  Point vertex(Eigen::Index i) const { return vertices_[static_cast<std::size_t>(i)]; }
  std::span<const Point> vertices() const noexcept { return vertices_; }

 private:
  Rect region_;
  std::vector<Eigen::Index> slot_;
  std::vector<Point> vertices_;
};

enum class GreenDomain { dirichlet_box, fullplane_approx, halfspace_approx };

const char* to_string(GreenDomain domain);

/// One column x -> G(x, source) on the proxy vertices of a region.
struct GreenColumn {
  Point source;
  GreenDomain domain = GreenDomain::dirichlet_box;
  std::shared_ptr<const VertexIndex> index;
  Eigen::VectorXd values;
  /// Value assigned to vertices outside the solved domain.
  double outside = 0.0;

  double value(Point p) const {
    const Eigen::Index i = (*index)[p];
    return i >= 0 ? values[i] : outside;
  }
};

/// Weighted graph Laplacian on proxy ∩ region with Dirichlet absorption on
/// every edge leaving the region.
class GreenOperator {
 public:
  GreenOperator(const Environment& env, const ClusterMap& clusters, Rect region, SolveMode mode = SolveMode::automatic,
                IterativeOptions options = {});

  const Rect& region() const noexcept { return index_->region(); }
  const VertexIndex& index() const noexcept { return *index_; }
  std::shared_ptr<const VertexIndex> shared_index() const noexcept { return index_; }
  const SparseMatrix& precision() const noexcept { return precision_; }
  Eigen::Index size() const noexcept { return precision_.rows(); }
  bool is_direct() const noexcept { return llt_ != nullptr; }
  const IterativeOptions& iterative_options() const noexcept { return options_; }

  /// The Cholesky factor; throws ParameterError("sampling requires direct mode") otherwise.
  const Factorization& factorization() const;

  /// Solves precision * x = rhs and verifies the residual.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  GreenColumn column(Point source) const;

 private:
  std::shared_ptr<const VertexIndex> index_;
  SparseMatrix precision_;
  std::unique_ptr<Factorization> llt_;
  IterativeOptions options_;
};

GreenOperator build_operator(const Environment& env, const ClusterMap& clusters, const Box& box,
                             SolveMode mode = SolveMode::automatic);
GreenOperator build_operator(const Environment& env, const ClusterMap& clusters, const Rect& region,
                             SolveMode mode = SolveMode::automatic);

/// Dirichlet Green column sourced at v (v must be a proxy vertex of the box).
GreenColumn green_dirichlet(const GreenOperator& op, Point source);

/// The full Green matrix on proxy ∩ region (small systems only).
Eigen::MatrixXd green_matrix(const GreenOperator& op);

/// diag(G) by selected inversion of the sparse Cholesky factor.
Eigen::VectorXd green_diagonal(const GreenOperator& op);

/// v - 2((v-w).e)e; e must be a signed unit axis vector.
Point mirror_point(Point v, Point w, Point e);

/// Window of side 2h+1 around v with h = ceil(window_factor * analysis_radius / 2).
Rect fullplane_window(Point v, std::int64_t analysis_radius, double window_factor = 4.0);

/// x -> G_Q(x,v) - G_Q(v,v) on Q = fullplane_window(v, ...); zero at v.
GreenColumn green_fullplane_approx(const Environment& env, const ClusterMap& clusters, Point v,
                                   std::int64_t analysis_radius, double window_factor = 4.0);

/// Dirichlet column on proxy ∩ window ∩ {x : (x-w).e >= 0}.
GreenColumn green_halfspace_approx(const Environment& env, const ClusterMap& clusters, Point w, Point e, Point v,
                                   const Rect& window);

}  // namespace lcgf
