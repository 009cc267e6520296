#include <vector>

#include "lcgf/laplace/operator.hpp"

namespace lcgf {

// Takahashi recurrences on the pattern of the Cholesky factor of P A P^T:
// Z = (L L^T)^{-1} is computed only where L is structurally nonzero, which is
// closed under the lookups the recurrence needs.
Eigen::VectorXd green_diagonal(const GreenOperator& op) {
  const Factorization& llt = op.factorization();
  const auto& L = llt.matrixL().nestedExpression();
  const Eigen::Index n = L.cols();
  const auto* outer = L.outerIndexPtr();
  const auto* inner = L.innerIndexPtr();
  const double* lx = L.valuePtr();

  std::vector<double> z(static_cast<std::size_t>(L.nonZeros()), 0.0);
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(n), -1);
  std::vector<double> scaled;
  std::vector<double> acc;

  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const Eigen::Index begin = outer[j];
    const Eigen::Index end = outer[j + 1];
    const double ljj = lx[begin];
    const Eigen::Index m = end - begin - 1;
    scaled.assign(static_cast<std::size_t>(m), 0.0);
    acc.assign(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index t = 0; t < m; ++t) {
      scaled[static_cast<std::size_t>(t)] = lx[begin + 1 + t] / ljj;
      pos[static_cast<std::size_t>(inner[begin + 1 + t])] = t;
    }
    for (Eigen::Index t = 0; t < m; ++t) {
      const Eigen::Index k = inner[begin + 1 + t];
      const double lk = scaled[static_cast<std::size_t>(t)];
      acc[static_cast<std::size_t>(t)] += lk * z[static_cast<std::size_t>(outer[k])];
      for (Eigen::Index q = outer[k] + 1; q < outer[k + 1]; ++q) {
        const Eigen::Index u = pos[static_cast<std::size_t>(inner[q])];
        if (u < 0) continue;
        const double zik = z[static_cast<std::size_t>(q)];
        acc[static_cast<std::size_t>(u)] += lk * zik;
        acc[static_cast<std::size_t>(t)] += scaled[static_cast<std::size_t>(u)] * zik;
      }
    }
    double diagonal = 1.0 / (ljj * ljj);
    for (Eigen::Index t = 0; t < m; ++t) {
      const double zkj = -acc[static_cast<std::size_t>(t)];
      z[static_cast<std::size_t>(begin + 1 + t)] = zkj;
      diagonal -= scaled[static_cast<std::size_t>(t)] * zkj;
      pos[static_cast<std::size_t>(inner[begin + 1 + t])] = -1;
    }
    z[static_cast<std::size_t>(begin)] = diagonal;
  }

  const auto& perm = llt.permutationP().indices();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = z[static_cast<std::size_t>(outer[perm[i]])];
  return out;
}

}  // namespace lcgf
