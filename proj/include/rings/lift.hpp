#pragma once

// Lifts: turn one mode of an attributed graph into a distance matrix over
// its nodes. Structural lifts work on a single connected component; the
// complementarity module owns the decomposition of disconnected graphs.

#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <string_view>

#include <Eigen/Eigenvalues>

#include "rings/core.hpp"

namespace rings {

enum class DiffusionConvention {
  laplacian_literal,   // weights lambda_i^t
  diffusion_operator,  // weights (1 - lambda_i)^t
};

enum class StructuralKind { diffusion, heat_kernel, resistance, shortest_path };
enum class FeatureMetric { euclidean, cosine };

struct StructuralMetric {
  StructuralKind kind = StructuralKind::diffusion;
  DiffusionConvention convention = DiffusionConvention::laplacian_literal;

  /// Whether the lift depends on the time parameter t.
  bool uses_time() const noexcept {
    return kind == StructuralKind::diffusion || kind == StructuralKind::heat_kernel;
  }
};

inline std::string_view to_string(StructuralKind k) {
  switch (k) {
    case StructuralKind::diffusion: return "diffusion";
    case StructuralKind::heat_kernel: return "heat-kernel";
    case StructuralKind::resistance: return "resistance";
    case StructuralKind::shortest_path: return "shortest-path";
  }
  return "diffusion";
}
inline StructuralKind structural_kind_from_string(std::string_view s) {
  if (s == "diffusion") return StructuralKind::diffusion;
  if (s == "heat-kernel" || s == "heat") return StructuralKind::heat_kernel;
  if (s == "resistance") return StructuralKind::resistance;
  if (s == "shortest-path") return StructuralKind::shortest_path;
  throw InputError("unknown structural metric '" + std::string(s) + "'");
}
inline std::string_view to_string(DiffusionConvention c) {
  return c == DiffusionConvention::laplacian_literal ? "laplacian-literal" : "diffusion-operator";
}
inline DiffusionConvention convention_from_string(std::string_view s) {
  if (s == "laplacian-literal") return DiffusionConvention::laplacian_literal;
  if (s == "diffusion-operator") return DiffusionConvention::diffusion_operator;
  throw InputError("unknown diffusion convention '" + std::string(s) + "'");
}
inline std::string_view to_string(FeatureMetric m) {
  return m == FeatureMetric::euclidean ? "euclidean" : "cosine";
}
inline FeatureMetric feature_metric_from_string(std::string_view s) {
  if (s == "euclidean") return FeatureMetric::euclidean;
  if (s == "cosine") return FeatureMetric::cosine;
  throw InputError("unknown feature metric '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Spectral kernels

inline Matrix adjacency_matrix(const AttributedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) a(e.u, e.v) = a(e.v, e.u) = 1.0;
  return a;
}

/// L = D - A.
inline Matrix combinatorial_laplacian(const AttributedGraph& g) {
  Matrix a = adjacency_matrix(g);
  Matrix l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

/// D^{-1/2} (D - A) D^{-1/2}; rows and columns of isolated nodes are zero.
inline Matrix normalized_laplacian(const AttributedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Vector deg = Vector::Zero(n);
  for (const Edge& e : g.edges()) {
    deg(e.u) += 1.0;
    deg(e.v) += 1.0;
  }
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (deg(i) > 0.0) l(i, i) = 1.0;
  }
  for (const Edge& e : g.edges()) {
    const double w = -1.0 / std::sqrt(deg(e.u) * deg(e.v));
    l(e.u, e.v) = l(e.v, e.u) = w;
  }
  return l;
}

/// Eigenvalues ascending; eigenvectors are the matching orthonormal columns.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Dense symmetric eigendecomposition (self-adjoint QR via Eigen).
inline EigenDecomposition sym_eigendecomposition(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("eigendecomposition needs a square matrix");
  if (m.size() == 0) return {};
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InputError("eigendecomposition needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge for a " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Euclidean distances between the rows of `y`.
inline Matrix pairwise_row_distances(const Matrix& y) {
  const Eigen::Index n = y.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (y.row(i) - y.row(j)).norm();
  }
  return d;
}

namespace detail {

inline void require_connected(const AttributedGraph& g, const char* what) {
  if (!is_connected(g)) {
    throw InputError(std::string(what) + " requires a connected graph (graph " +
                     std::to_string(g.id()) + ")");
  }
}

// Complete graphs are vertex-transitive, so every structural metric takes one
// value off the diagonal. Pin it exactly to remove eigensolver round-off.
inline void make_uniform(Matrix& d) {
  const Eigen::Index n = d.rows();
  if (n < 2) return;
  const double v = d.sum() / static_cast<double>(n * (n - 1));
  d.setConstant(v);
  d.diagonal().setZero();
}

}  // namespace detail

/// Spectrum of the normalized Laplacian of a connected graph, reusable across
/// diffusion times and both spectral lifts.
class LaplacianSpectrum {
 public:
  explicit LaplacianSpectrum(const AttributedGraph& g)
      : eig_(sym_eigendecomposition(normalized_laplacian(g))), complete_(is_complete(g)) {
    detail::require_connected(g, "spectral lift");
  }

  const EigenDecomposition& decomposition() const noexcept { return eig_; }

  /// Distances between diffusion-map embeddings using all n eigenpairs.
  DistanceMatrix diffusion(int t, DiffusionConvention convention) const {
    if (t < 1) throw InputError("diffusion time must be a positive integer");
    const auto& lambda = eig_.eigenvalues;
    Vector w(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      const double base =
          convention == DiffusionConvention::laplacian_literal ? lambda(i) : 1.0 - lambda(i);
      w(i) = std::pow(base, t);
    }
    Matrix d = pairwise_row_distances(eig_.eigenvectors * w.asDiagonal());
    if (complete_) detail::make_uniform(d);
    return DistanceMatrix::from_numeric(std::move(d));
  }

  /// Kernel-induced metric of h_t = sum_i exp(-lambda_i t) psi_i psi_i^T.
  DistanceMatrix heat_kernel(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("heat-kernel time must be positive");
    const Matrix h = heat_kernel_matrix(t);
    const Eigen::Index n = h.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index u = 0; u < n; ++u) {
      for (Eigen::Index v = u + 1; v < n; ++v) {
        d(u, v) = d(v, u) = std::sqrt(std::max(0.0, h(u, u) + h(v, v) - 2.0 * h(u, v)));
      }
    }
    if (complete_) detail::make_uniform(d);
    return DistanceMatrix::from_numeric(std::move(d));
  }

  Matrix heat_kernel_matrix(double t) const {
    Vector w = (-t * eig_.eigenvalues.array()).exp().matrix();
    return eig_.eigenvectors * w.asDiagonal() * eig_.eigenvectors.transpose();
  }

 private:
  EigenDecomposition eig_;
  bool complete_;
};

inline DistanceMatrix diffusion_distance(const AttributedGraph& g, int t,
                                         DiffusionConvention convention) {
  return LaplacianSpectrum(g).diffusion(t, convention);
}

inline DistanceMatrix heat_kernel_distance(const AttributedGraph& g, double t) {
  return LaplacianSpectrum(g).heat_kernel(t);
}

/// Effective resistance through Lambda = (L + J/n)^+.
inline DistanceMatrix resistance_distance(const AttributedGraph& g) {
  detail::require_connected(g, "resistance distance");
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix m = combinatorial_laplacian(g);
  m.array() += 1.0 / static_cast<double>(n);
  const EigenDecomposition eig = sym_eigendecomposition(m);
  const double cutoff =
      std::numeric_limits<double>::epsilon() * static_cast<double>(n) *
      std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
  Vector inv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv(i) = std::abs(eig.eigenvalues(i)) > cutoff ? 1.0 / eig.eigenvalues(i) : 0.0;
  }
  const Matrix pinv = eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.transpose();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      d(u, v) = d(v, u) = pinv(u, u) + pinv(v, v) - pinv(u, v) - pinv(v, u);
    }
  }
  if (is_complete(g)) detail::make_uniform(d);
  return DistanceMatrix::from_numeric(std::move(d));
}

/// Hop counts by breadth-first search.
inline DistanceMatrix shortest_path_distance(const AttributedGraph& g) {
  detail::require_connected(g, "shortest-path distance");
  const auto adj = adjacency_lists(g);
  const std::size_t n = g.num_nodes();
  Matrix d = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<int> dist(n);
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId w : adj[u]) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    for (NodeId v = 0; v < n; ++v) d(s, v) = dist[v];
  }
  return DistanceMatrix(std::move(d));
}

/// Structural lift of a whole graph. Edgeless graphs lift to the trivial
/// (all-zero) space; otherwise the graph must be connected. `t` is ignored by
/// resistance and shortest-path distances.
inline DistanceMatrix structural_distance(const AttributedGraph& g, const StructuralMetric& metric,
                                          double t = 1.0) {
  if (g.num_edges() == 0) return DistanceMatrix::zeros(g.num_nodes());
  switch (metric.kind) {
    case StructuralKind::diffusion: {
      const int steps = static_cast<int>(t);
      if (static_cast<double>(steps) != t) throw InputError("diffusion time must be an integer");
      return diffusion_distance(g, steps, metric.convention);
    }
    case StructuralKind::heat_kernel: return heat_kernel_distance(g, t);
    case StructuralKind::resistance: return resistance_distance(g);
    case StructuralKind::shortest_path: return shortest_path_distance(g);
  }
  throw InputError("unknown structural metric");
}

// ---------------------------------------------------------------------------
// Feature lifts

/// Cosine distance treats two zero rows as identical (0) and a zero row
/// against a nonzero row as orthogonal (1); values are clamped to [0, 2].
inline DistanceMatrix feature_distance(const Matrix& x, FeatureMetric metric) {
  if (!x.allFinite()) throw InputError("feature matrix has non-finite entries");
  if (metric == FeatureMetric::euclidean) {
    return DistanceMatrix::from_numeric(pairwise_row_distances(x));
  }
  const Eigen::Index n = x.rows();
  const Vector norms = x.rowwise().norm();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v;
      const bool zi = norms(i) == 0.0, zj = norms(j) == 0.0;
      if (zi && zj) {
        v = 0.0;
      } else if (zi || zj) {
        v = 1.0;
      } else {
        v = 1.0 - x.row(i).dot(x.row(j)) / (norms(i) * norms(j));
        v = std::clamp(v, 0.0, 2.0);
      }
      d(i, j) = d(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(d));
}

/// Divides by the diameter; zero-diameter spaces are returned unchanged.
inline DistanceMatrix normalize_diameter(const DistanceMatrix& d) {
  const double diam = d.diameter();
  if (diam <= 0.0) return d;
  Matrix m = d.values() / diam;
  // Entries equal to the diameter map to exactly 1 under IEEE division.
  return DistanceMatrix(std::move(m));
}

}  // namespace rings
