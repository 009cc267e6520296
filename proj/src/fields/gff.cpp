#include "lcgf/fields/gff.hpp"

#include "lcgf/errors.hpp"

namespace lcgf {

Eigen::VectorXd draw_gff(const GreenOperator& op, CounterStream& rng) {
  const Factorization& llt = op.factorization();
  Eigen::VectorXd z(op.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  const Eigen::VectorXd y = llt.matrixU().solve(z);
  return llt.permutationPinv() * y;
}

FieldSample to_box_field(const GreenOperator& op, const ClusterMap& clusters, const Eigen::VectorXd& x,
                         const GffOptions& options) {
  const Rect& region = op.region();
  if (region.width != region.height) throw ParameterError("GFF fields live on square boxes");
  FieldSample field;
  field.dim = 2;
  field.corner = region.lo;
  field.side = region.width;
  field.model = options.extend ? FieldModel::gff_extended : FieldModel::gff;
  field.scaling = options.scaling;
  field.values = Eigen::VectorXd::Zero(region.size());
  const VertexIndex& index = op.index();
  for (std::int64_t i = 0; i < region.size(); ++i) {
    const Point v = region.point(i);
    const Eigen::Index k = index[options.extend ? clusters.projection(v) : v];
    if (k >= 0) field.values[i] = options.scaling * x[k];
  }
  return field;
}

FieldSample sample_gff_replicate(const GreenOperator& op, const ClusterMap& clusters, std::uint64_t master_seed,
                                 std::uint64_t replicate, const GffOptions& options) {
  const std::uint64_t stream = stream_id(master_seed, replicate, StreamTag::gff);
  CounterStream rng(stream);
  FieldSample field = to_box_field(op, clusters, draw_gff(op, rng), options);
  field.replicate_id = replicate;
  field.rng_stream = stream;
  return field;
}

std::vector<FieldSample> sample_gff(const GreenOperator& op, const ClusterMap& clusters, std::uint64_t master_seed,
                                    std::size_t count, const GffOptions& options, std::uint64_t first_replicate) {
  if (count < 1) throw ParameterError("sample_gff: count must be at least 1");
  std::vector<FieldSample> out;
  out.reserve(count);
  for (std::size_t r = 0; r < count; ++r)
    out.push_back(sample_gff_replicate(op, clusters, master_seed, first_replicate + r, options));
  return out;
}

}  // namespace lcgf
