#pragma once

#include <cstdint>
#include <vector>

#include "lcgf/env/clusters.hpp"
#include "lcgf/fields/field_sample.hpp"
#include "lcgf/laplace/operator.hpp"
#include "lcgf/rng.hpp"

namespace lcgf {

/// One Gaussian vector with covariance precision^{-1}: x = P^{-1} L^{-T} z.
Eigen::VectorXd draw_gff(const GreenOperator& op, CounterStream& rng);

struct GffOptions {
  /// Extend by v -> v* (gff_extended) instead of zero off the cluster (gff).
  bool extend = true;
  /// Multiplier applied to every value, e.g. sqrt(2πā).
  double scaling = 1.0;
};

/// Values of a solver vector on the operator's (square) box: zero off the
/// proxy, or extended by projection.
FieldSample to_box_field(const GreenOperator& op, const ClusterMap& clusters, const Eigen::VectorXd& x,
                         const GffOptions& options);

/// Replicate r uses the stream stream_id(master_seed, r, gff).
FieldSample sample_gff_replicate(const GreenOperator& op, const ClusterMap& clusters, std::uint64_t master_seed,
                                 std::uint64_t replicate, const GffOptions& options = {});

std::vector<FieldSample> sample_gff(const GreenOperator& op, const ClusterMap& clusters, std::uint64_t master_seed,
                                    std::size_t count, const GffOptions& options = {},
                                    std::uint64_t first_replicate = 0);

}  // namespace lcgf
