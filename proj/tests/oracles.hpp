#pragma once

// Reference computations used by the tests. They share no code with the
// library beyond the Environment accessors.

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "lcgf/env/environment.hpp"

namespace oracle {

using lcgf::Point;

inline lcgf::Environment unit_env(std::int64_t w, std::int64_t h, double c = 1.0, Point origin = {0, 0}) {
  lcgf::EnvironmentParams p;
  p.origin = origin;
  p.width = w;
  p.height = h;
  p.lambda_minus = p.lambda_plus = c;
  return lcgf::Environment(p, std::vector<double>(static_cast<std::size_t>((w - 1) * h), c),
                           std::vector<double>(static_cast<std::size_t>(w * (h - 1)), c));
}

inline lcgf::Environment env_from_edges(std::int64_t w, std::int64_t h, std::vector<double> he,
                                        std::vector<double> ve) {
  lcgf::EnvironmentParams p;
  p.width = w;
  p.height = h;
  p.p = 0.75;
  return lcgf::Environment(p, std::move(he), std::move(ve));
}

/// Dense Laplacian on `vertices` with all four neighbours counted on the diagonal.
inline Eigen::MatrixXd dense_precision(const lcgf::Environment& env, const std::vector<Point>& vertices) {
  std::map<Point, Eigen::Index> id;
  for (std::size_t i = 0; i < vertices.size(); ++i) id[vertices[i]] = static_cast<Eigen::Index>(i);
  const auto n = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const Point offs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Point o : offs) {
      const double a = env.conductance_or_zero(vertices[static_cast<std::size_t>(i)], o);
      A(i, i) += a;
      auto it = id.find(vertices[static_cast<std::size_t>(i)] + o);
      if (it != id.end()) A(i, it->second) -= a;
    }
  return A;
}

inline Eigen::MatrixXd dense_green(const lcgf::Environment& env, const std::vector<Point>& vertices) {
  const Eigen::MatrixXd A = dense_precision(env, vertices);
  return A.fullPivLu().inverse();
}

/// Breadth-first distances over open edges from u; -1 where unreachable.
inline std::map<Point, std::int64_t> bfs(const lcgf::Environment& env, Point u) {
  std::map<Point, std::int64_t> dist{{u, 0}};
  std::deque<Point> queue{u};
  const Point offs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!queue.empty()) {
    const Point x = queue.front();
    queue.pop_front();
    for (Point o : offs)
      if (env.conductance_or_zero(x, o) > 0 && !dist.count(x + o)) {
        dist[x + o] = dist[x] + 1;
        queue.push_back(x + o);
      }
  }
  return dist;
}

/// BRW covariance by enumerating every box of every dyadic tiling of [0,N)^d.
inline double brute_brw_covariance(std::int64_t N, const std::vector<std::int64_t>& u,
                                   const std::vector<std::int64_t>& v) {
  const std::size_t d = u.size();
  double cov = 0.0;
  for (std::int64_t b = 1; b <= N; b *= 2) {
    std::vector<std::int64_t> c(d, 0);
    while (true) {
      bool both = true;
      for (std::size_t k = 0; k < d; ++k)
        both = both && u[k] >= c[k] && u[k] < c[k] + b && v[k] >= c[k] && v[k] < c[k] + b;
      if (both) cov += std::log(2.0);
      std::size_t k = 0;
      while (k < d && (c[k] += b) >= N) c[k++] = 0;
      if (k == d) break;
    }
  }
  return cov;
}

/// MBRW covariance by enumerating every corner in V_N and every level, with
/// torus-wrapped membership.
inline double brute_mbrw_covariance(std::int64_t N, const std::vector<std::int64_t>& u,
                                    const std::vector<std::int64_t>& v) {
  const std::size_t d = u.size();
  auto mod = [N](std::int64_t a) { return ((a % N) + N) % N; };
  double cov = 0.0;
  for (std::int64_t b = 1; b <= N; b *= 2) {
    const double weight = std::log(2.0) / std::pow(static_cast<double>(b), static_cast<double>(d));
    std::vector<std::int64_t> c(d, 0);
    while (true) {
      bool both = true;
      for (std::size_t k = 0; k < d; ++k) both = both && mod(u[k] - c[k]) < b && mod(v[k] - c[k]) < b;
      if (both) cov += weight;
      std::size_t k = 0;
      while (k < d && ++c[k] == N) c[k++] = 0;
      if (k == d) break;
    }
  }
  return cov;
}

/// Five-point finite-difference Green's function of -Δ on (0,1)^2 with grid
/// spacing 1/n, source at grid node (si, sj). Returns the grid values.
inline Eigen::VectorXd fd_square_green(int n, int si, int sj) {
  const int m = n - 1;
  std::vector<Eigen::Triplet<double>> t;
  auto id = [m](int i, int j) { return (j - 1) * m + (i - 1); };
  for (int j = 1; j <= m; ++j)
    for (int i = 1; i <= m; ++i) {
      t.emplace_back(id(i, j), id(i, j), 4.0);
      if (i > 1) t.emplace_back(id(i, j), id(i - 1, j), -1.0);
      if (i < m) t.emplace_back(id(i, j), id(i + 1, j), -1.0);
      if (j > 1) t.emplace_back(id(i, j), id(i, j - 1), -1.0);
      if (j < m) t.emplace_back(id(i, j), id(i, j + 1), -1.0);
    }
  Eigen::SparseMatrix<double> A(m * m, m * m);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m * m);
  b[id(si, sj)] = 1.0;
  return ldlt.solve(b);
}

inline int fd_index(int n, int i, int j) { return (j - 1) * (n - 1) + (i - 1); }

}  // namespace oracle
