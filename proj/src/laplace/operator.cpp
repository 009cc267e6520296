#include "lcgf/laplace/operator.hpp"

#include <Eigen/IterativeLinearSolvers>

#include "lcgf/errors.hpp"

namespace lcgf {

VertexIndex::VertexIndex(const ClusterMap& clusters, Rect region)
    : region_(region), slot_(static_cast<std::size_t>(std::max<std::int64_t>(region.size(), 0)), -1) {
  for (std::int64_t i = 0; i < region_.size(); ++i) {
    const Point p = region_.point(i);
    if (!clusters.in_proxy(p)) continue;
    slot_[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(vertices_.size());
    vertices_.push_back(p);
  }
}

const char* to_string(GreenDomain domain) {
  switch (domain) {
    case GreenDomain::dirichlet_box: return "dirichlet_box";
    case GreenDomain::fullplane_approx: return "fullplane_approx";
    case GreenDomain::halfspace_approx: return "halfspace_approx";
  }
  return "unknown";
}

GreenOperator::GreenOperator(const Environment& env, const ClusterMap& clusters, Rect region, SolveMode mode,
                             IterativeOptions options)
    : options_(options) {
  if (region.empty()) throw ParameterError("empty region");
  if (!env.window().contains(region.grown(1)))
    throw ParameterError("the outer boundary of the region must lie inside the environment window");
  if (clusters.window() != env.window()) throw ParameterError("cluster map does not belong to this environment");
  index_ = std::make_shared<const VertexIndex>(clusters, region);
  const Eigen::Index n = index_->size();
  if (n == 0) throw ParameterError("proxy cluster does not meet the region");

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(5 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point v = index_->vertex(i);
    double diagonal = 0.0;
    for (Point off : kNeighbourOffsets) {
      const double a = env.conductance_or_zero(v, off);
      if (a == 0.0) continue;
      diagonal += a;
      const Eigen::Index j = (*index_)[v + off];
      if (j >= 0) entries.emplace_back(i, j, -a);
    }
    if (diagonal <= 0.0) throw NumericalError("spd", "zero row in the precision matrix");
    entries.emplace_back(i, i, diagonal);
  }
  precision_.resize(n, n);
  precision_.setFromTriplets(entries.begin(), entries.end());
  precision_.makeCompressed();

  const bool direct = mode == SolveMode::direct || (mode == SolveMode::automatic && n <= kDirectSolveLimit);
  if (direct) {
    llt_ = std::make_unique<Factorization>(precision_);
    if (llt_->info() != Eigen::Success) throw NumericalError("spd", "Cholesky factorization failed");
  }
}

const Factorization& GreenOperator::factorization() const {
  if (!llt_) throw ParameterError("sampling requires direct mode");
  return *llt_;
}

Eigen::VectorXd GreenOperator::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x;
  if (llt_) {
    x = llt_->solve(rhs);
    const double residual = (precision_ * x - rhs).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-9 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())))
      throw NumericalError("residual", "direct solve residual " + std::to_string(residual));
    return x;
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(0.5 * options_.tolerance);
  cg.setMaxIterations(options_.max_iterations);
  cg.compute(precision_);
  x = cg.solve(rhs);
  if (cg.info() != Eigen::Success)
    throw NumericalError("convergence", "conjugate gradient did not converge in " +
                                            std::to_string(options_.max_iterations) + " iterations");
  const double relative = (precision_ * x - rhs).norm() / rhs.norm();
  if (!(relative <= options_.tolerance))
    throw NumericalError("residual", "iterative solve residual " + std::to_string(relative));
  return x;
}

GreenColumn GreenOperator::column(Point source) const {
  const Eigen::Index s = (*index_)[source];
  if (s < 0) throw ParameterError("source is not a proxy vertex of the region");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size());
  rhs[s] = 1.0;
  return {source, GreenDomain::dirichlet_box, index_, solve(rhs), 0.0};
}

GreenOperator build_operator(const Environment& env, const ClusterMap& clusters, const Box& box, SolveMode mode) {
  return GreenOperator(env, clusters, box.rect(), mode);
}

GreenOperator build_operator(const Environment& env, const ClusterMap& clusters, const Rect& region,
                             SolveMode mode) {
  return GreenOperator(env, clusters, region, mode);
}

GreenColumn green_dirichlet(const GreenOperator& op, Point source) { return op.column(source); }

Eigen::MatrixXd green_matrix(const GreenOperator& op) {
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(op.size(), op.size());
  if (op.is_direct()) return op.factorization().solve(identity);
  Eigen::MatrixXd g(op.size(), op.size());
  for (Eigen::Index j = 0; j < op.size(); ++j) g.col(j) = op.solve(identity.col(j));
  return g;
}

}  // namespace lcgf
