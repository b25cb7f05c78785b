#pragma once

// Domain types shared by every stage of the pipeline: attributed graphs,
// datasets, distance matrices, and the per-graph / per-dataset statistics
// reported alongside complementarity scores.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace rings {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using NodeId = std::uint32_t;
using GraphId = std::int64_t;

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: malformed files, out-of-range parameters, missing data.
/// The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to meet its contract (e.g. no convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Undirected edge stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Graph-level prediction target.
struct ClassTarget {
  std::int64_t label = 0;
  friend bool operator==(const ClassTarget&, const ClassTarget&) = default;
};
struct LabelSetTarget {
  std::vector<std::int64_t> labels;
  friend bool operator==(const LabelSetTarget&, const LabelSetTarget&) = default;
};
struct RealTarget {
  double value = 0.0;
  friend bool operator==(const RealTarget&, const RealTarget&) = default;
};
using Target = std::variant<ClassTarget, LabelSetTarget, RealTarget>;

/// One graph with node features. Immutable after construction; the
/// constructor enforces the invariants (endpoints in range, no self-loops,
/// no duplicate pairs, n feature rows, finite entries).
class AttributedGraph {
 public:
  AttributedGraph(GraphId id, std::size_t n, std::vector<Edge> edges, Matrix features,
                  std::optional<Target> target = std::nullopt)
      : id_(id), n_(n), edges_(std::move(edges)), features_(std::move(features)),
        target_(std::move(target)) {
    if (n_ == 0) throw InputError("graph " + std::to_string(id_) + ": node count must be >= 1");
    if (static_cast<std::size_t>(features_.rows()) != n_) {
      throw InputError("graph " + std::to_string(id_) + ": feature matrix has " +
                       std::to_string(features_.rows()) + " rows for " + std::to_string(n_) +
                       " nodes");
    }
    if (features_.cols() < 1) {
      throw InputError("graph " + std::to_string(id_) + ": feature matrix needs >= 1 column");
    }
    if (!features_.allFinite()) {
      throw InputError("graph " + std::to_string(id_) + ": non-finite feature entry");
    }
    for (const Edge& e : edges_) {
      if (e.u == e.v) {
        throw InputError("graph " + std::to_string(id_) + ": self-loop at node " +
                         std::to_string(e.u));
      }
      if (e.u > e.v) throw InputError("graph " + std::to_string(id_) + ": edge not normalized");
      if (e.v >= n_) {
        throw InputError("graph " + std::to_string(id_) + ": edge endpoint " +
                         std::to_string(e.v) + " out of range for n=" + std::to_string(n_));
      }
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
      throw InputError("graph " + std::to_string(id_) + ": duplicate edge");
    }
  }

  GraphId id() const noexcept { return id_; }
  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  /// Sorted, unique, u < v.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Matrix& features() const noexcept { return features_; }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  const std::optional<Target>& target() const noexcept { return target_; }

  AttributedGraph with_edges(std::vector<Edge> edges) const {
    return AttributedGraph(id_, n_, std::move(edges), features_, target_);
  }
  AttributedGraph with_features(Matrix features) const {
    return AttributedGraph(id_, n_, edges_, std::move(features), target_);
  }

  friend bool operator==(const AttributedGraph& a, const AttributedGraph& b) {
    return a.id_ == b.id_ && a.n_ == b.n_ && a.edges_ == b.edges_ &&
           a.features_.rows() == b.features_.rows() && a.features_.cols() == b.features_.cols() &&
           a.features_ == b.features_ && a.target_ == b.target_;
  }

 private:
  GraphId id_;
  std::size_t n_;
  std::vector<Edge> edges_;
  Matrix features_;
  std::optional<Target> target_;
};

enum class TaskKind { binary_class, multi_class, multi_label, regression, none };

inline const char* to_string(TaskKind t) {
  switch (t) {
    case TaskKind::binary_class: return "binary-class";
    case TaskKind::multi_class: return "multi-class";
    case TaskKind::multi_label: return "multi-label";
    case TaskKind::regression: return "regression";
    case TaskKind::none: return "none";
  }
  return "none";
}

inline TaskKind task_from_string(const std::string& s) {
  if (s == "binary-class") return TaskKind::binary_class;
  if (s == "multi-class") return TaskKind::multi_class;
  if (s == "multi-label") return TaskKind::multi_label;
  if (s == "regression") return TaskKind::regression;
  if (s == "none") return TaskKind::none;
  throw InputError("unknown task kind '" + s + "'");
}

/// Named, ordered collection of graphs with unique ids.
class GraphDataset {
 public:
  GraphDataset(std::string name, std::vector<AttributedGraph> graphs,
               TaskKind task = TaskKind::none)
      : name_(std::move(name)), graphs_(std::move(graphs)), task_(task) {
    std::vector<GraphId> ids;
    ids.reserve(graphs_.size());
    for (const auto& g : graphs_) ids.push_back(g.id());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw InputError("dataset " + name_ + ": duplicate graph id");
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<AttributedGraph>& graphs() const noexcept { return graphs_; }
  std::size_t size() const noexcept { return graphs_.size(); }
  TaskKind task() const noexcept { return task_; }

  friend bool operator==(const GraphDataset&, const GraphDataset&) = default;

 private:
  std::string name_;
  std::vector<AttributedGraph> graphs_;
  TaskKind task_;
};

/// Symmetric, nonnegative, finite n x n matrix with zero diagonal.
class DistanceMatrix {
 public:
  /// Validates exactly; use `from_numeric` for matrices produced by
  /// floating-point routines that are symmetric only up to rounding.
  explicit DistanceMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) throw InputError("distance matrix must be square");
    const Eigen::Index n = values_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (values_(i, i) != 0.0) throw InputError("distance matrix diagonal must be zero");
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = values_(i, j);
        if (!std::isfinite(d) || d < 0.0) {
          throw InputError("distance matrix entries must be finite and nonnegative");
        }
        if (d != values_(j, i)) throw InputError("distance matrix must be symmetric");
      }
    }
  }

  /// Symmetrizes, zeroes the diagonal and clamps tiny negatives. Rejects
  /// inputs whose asymmetry or negativity exceeds `tol`.
  static DistanceMatrix from_numeric(Matrix m, double tol = 1e-9) {
    if (m.rows() != m.cols()) throw InputError("distance matrix must be square");
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double a = m(i, j), b = m(j, i);
        if (!std::isfinite(a) || !std::isfinite(b)) {
          throw NumericalError("non-finite distance");
        }
        const double scale = std::max({1.0, std::abs(a), std::abs(b)});
        if (std::abs(a - b) > tol * scale) throw NumericalError("distance matrix not symmetric");
        double s = 0.5 * (a + b);
        if (s < 0.0) {
          if (s < -tol * scale) throw NumericalError("negative distance");
          s = 0.0;
        }
        m(i, j) = m(j, i) = s;
      }
    }
    return DistanceMatrix(std::move(m));
  }

  static DistanceMatrix zeros(std::size_t n) {
    return DistanceMatrix(Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  /// The discrete metric space: 1 off the diagonal.
  static DistanceMatrix discrete(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    Matrix m = Matrix::Ones(k, k);
    m.diagonal().setZero();
    return DistanceMatrix(std::move(m));
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double diameter() const { return values_.size() == 0 ? 0.0 : values_.maxCoeff(); }

  friend bool operator==(const DistanceMatrix& a, const DistanceMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

// ---------------------------------------------------------------------------
// Statistics

struct GraphStats {
  std::size_t n = 0;
  std::size_t m_directed = 0;  // both directions: 2|E|
  double mean_degree = 0.0;
  double density = 0.0;
};

inline GraphStats graph_stats(const AttributedGraph& g) {
  GraphStats s;
  s.n = g.num_nodes();
  s.m_directed = 2 * g.num_edges();
  const double n = static_cast<double>(s.n);
  s.mean_degree = static_cast<double>(s.m_directed) / n;
  s.density = s.n > 1 ? static_cast<double>(s.m_directed) / (n * (n - 1.0)) : 0.0;
  return s;
}

/// Mean and sample standard deviation (divisor N-1). A single observation
/// reports sd = 0 with `sd_defined = false`.
struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  bool sd_defined = false;
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
  if (xs.empty()) throw InputError("mean of empty sample");
  MeanSd r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    r.sd_defined = true;
  }
  return r;
}

struct DatasetStats {
  std::string name;
  std::size_t num_graphs = 0;
  MeanSd n, m, degree, density;
  static constexpr const char* sd_convention = "sample (divisor N-1)";
};

inline DatasetStats dataset_stats(const GraphDataset& d) {
  if (d.size() == 0) throw InputError("dataset " + d.name() + " is empty");
  std::vector<double> n, m, deg, rho;
  for (const auto& g : d.graphs()) {
    const GraphStats s = graph_stats(g);
    n.push_back(static_cast<double>(s.n));
    m.push_back(static_cast<double>(s.m_directed));
    deg.push_back(s.mean_degree);
    rho.push_back(s.density);
  }
  DatasetStats out;
  out.name = d.name();
  out.num_graphs = d.size();
  out.n = mean_sd(n);
  out.m = mean_sd(m);
  out.degree = mean_sd(deg);
  out.density = mean_sd(rho);
  return out;
}

// ---------------------------------------------------------------------------
// Small graph utilities used by several modules.

inline std::vector<std::vector<NodeId>> adjacency_lists(const AttributedGraph& g) {
  std::vector<std::vector<NodeId>> adj(g.num_nodes());
  for (const Edge& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

/// Connected components, each sorted ascending, ordered by smallest node.
inline std::vector<std::vector<NodeId>> connected_components(const AttributedGraph& g) {
  const auto adj = adjacency_lists(g);
  std::vector<int> seen(g.num_nodes(), 0);
  std::vector<std::vector<NodeId>> comps;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (seen[s]) continue;
    comps.emplace_back();
    auto& comp = comps.back();
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (NodeId w : adj[u]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
  }
  return comps;
}

inline bool is_connected(const AttributedGraph& g) { return connected_components(g).size() == 1; }

inline bool is_complete(const AttributedGraph& g) {
  const std::size_t n = g.num_nodes();
  return g.num_edges() == n * (n - 1) / 2;
}

/// Induced subgraph on `nodes` (sorted), relabelled 0..k-1 in that order.
inline AttributedGraph induced_subgraph(const AttributedGraph& g, const std::vector<NodeId>& nodes) {
  std::vector<std::int64_t> index(g.num_nodes(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = static_cast<std::int64_t>(i);
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (index[e.u] >= 0 && index[e.v] >= 0) {
      edges.emplace_back(static_cast<NodeId>(index[e.u]), static_cast<NodeId>(index[e.v]));
    }
  }
  Matrix x(static_cast<Eigen::Index>(nodes.size()), g.features().cols());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = g.features().row(nodes[i]);
  }
  return AttributedGraph(g.id(), nodes.size(), std::move(edges), std::move(x));
}

}  // namespace rings
