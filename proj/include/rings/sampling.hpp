#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "rings/core.hpp"

namespace rings {

using Rng = std::mt19937_64;

/// n x k matrix of i.i.d. standard normal entries.
inline Matrix standard_normal_matrix(std::size_t n, std::size_t k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = normal(rng);
  }
  return x;
}

/// G(n, p): every unordered pair included independently with probability p.
inline std::vector<Edge> erdos_renyi_edges(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0,1]");
  std::vector<Edge> edges;
  std::bernoulli_distribution coin(p);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return edges;
}

inline std::vector<Edge> complete_edges(std::size_t n) {
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return edges;
}

/// Uniform random permutation of 0..n-1; perm[i] is the image of i.
inline std::vector<NodeId> random_permutation(std::size_t n, Rng& rng) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace rings
