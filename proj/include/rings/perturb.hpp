#pragma once

// Mode perturbations: each replaces exactly one mode (structure or
// features) of an attributed graph and leaves the other untouched.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "rings/core.hpp"
#include "rings/sampling.hpp"
#include "rings/util.hpp"

namespace rings {

/// Canonical perturbation names; `o` is the identity.
enum class Mode { o, ef, cf, rf, sf, eg, cg, rg, sg };

inline constexpr std::array<Mode, 9> kAllModes = {Mode::o,  Mode::eg, Mode::cg, Mode::rg, Mode::sg,
                                                  Mode::ef, Mode::cf, Mode::rf, Mode::sf};

inline constexpr std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::o: return "o";
    case Mode::ef: return "ef";
    case Mode::cf: return "cf";
    case Mode::rf: return "rf";
    case Mode::sf: return "sf";
    case Mode::eg: return "eg";
    case Mode::cg: return "cg";
    case Mode::rg: return "rg";
    case Mode::sg: return "sg";
  }
  return "o";
}

inline std::optional<Mode> try_parse_mode(std::string_view s) {
  for (Mode m : kAllModes) {
    if (mode_name(m) == s) return m;
  }
  return std::nullopt;
}

inline Mode parse_mode(std::string_view s) {
  if (auto m = try_parse_mode(s)) return *m;
  throw InputError("unknown perturbation kind '" + std::string(s) +
                   "' (expected one of o, ef, cf, rf, sf, eg, cg, rg, sg)");
}

inline constexpr bool is_structural(Mode m) {
  return m == Mode::eg || m == Mode::cg || m == Mode::rg || m == Mode::sg;
}
inline constexpr bool is_feature(Mode m) {
  return m == Mode::ef || m == Mode::cf || m == Mode::rf || m == Mode::sf;
}
inline constexpr bool is_random(Mode m) {
  return m == Mode::rf || m == Mode::sf || m == Mode::rg || m == Mode::sg;
}

/// A perturbation with its parameters.
struct PerturbationKind {
  Mode mode = Mode::o;
  std::size_t feature_dim = 10;            // rf
  std::optional<double> edge_probability;  // rg; unset = match the input density

  static PerturbationKind of(Mode m) { return PerturbationKind{m, 10, std::nullopt}; }
  static PerturbationKind random_features(std::size_t dim) {
    if (dim < 1) throw InputError("random feature dimension must be >= 1");
    return PerturbationKind{Mode::rf, dim, std::nullopt};
  }
  static PerturbationKind random_graph(std::optional<double> p = std::nullopt) {
    if (p && !(*p >= 0.0 && *p <= 1.0)) throw InputError("edge probability must lie in [0,1]");
    return PerturbationKind{Mode::rg, 10, p};
  }
};

/// Relabels endpoints: edge (u, v) becomes (perm[u], perm[v]). Features stay
/// with their node index, so the node-feature pairing changes.
inline AttributedGraph relabel_structure(const AttributedGraph& g, const std::vector<NodeId>& perm) {
  if (perm.size() != g.num_nodes()) throw InputError("permutation size mismatch");
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) edges.emplace_back(perm[e.u], perm[e.v]);
  return g.with_edges(std::move(edges));
}

/// Row i of the output is row perm[i] of the input.
inline AttributedGraph permute_feature_rows(const AttributedGraph& g, const std::vector<NodeId>& perm) {
  if (perm.size() != g.num_nodes()) throw InputError("permutation size mismatch");
  Matrix x(g.features().rows(), g.features().cols());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = g.features().row(perm[i]);
  }
  return g.with_features(std::move(x));
}

inline double edge_density(const AttributedGraph& g) {
  const double n = static_cast<double>(g.num_nodes());
  return g.num_nodes() > 1 ? 2.0 * static_cast<double>(g.num_edges()) / (n * (n - 1.0)) : 0.0;
}

/// Applies one perturbation. `seed` is used only by the random kinds.
inline AttributedGraph perturb_graph(const AttributedGraph& g, const PerturbationKind& kind,
                                     std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  Rng rng(seed);
  switch (kind.mode) {
    case Mode::o: return g;
    case Mode::ef: return g.with_features(Matrix::Zero(static_cast<Eigen::Index>(n), 1));
    case Mode::cf:
      return g.with_features(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    case Mode::rf:
      if (kind.feature_dim < 1) throw InputError("random feature dimension must be >= 1");
      return g.with_features(standard_normal_matrix(n, kind.feature_dim, rng));
    case Mode::sf: return permute_feature_rows(g, random_permutation(n, rng));
    case Mode::eg: return g.with_edges({});
    case Mode::cg: return g.with_edges(complete_edges(n));
    case Mode::rg:
      return g.with_edges(erdos_renyi_edges(n, kind.edge_probability.value_or(edge_density(g)), rng));
    case Mode::sg: return relabel_structure(g, random_permutation(n, rng));
  }
  return g;
}

/// Element-wise dataset perturbation. Graph i uses the seed derived from
/// (master_seed, dataset name, graph id), so output is independent of the
/// thread count.
inline GraphDataset perturb_dataset(const GraphDataset& d, const PerturbationKind& kind,
                                    std::uint64_t master_seed, unsigned threads = 1) {
  std::vector<std::optional<AttributedGraph>> slots(d.size());
  parallel_for(d.size(), threads, [&](std::size_t i) {
    const auto& g = d.graphs()[i];
    slots[i].emplace(perturb_graph(g, kind, graph_seed(master_seed, d.name(), g.id())));
  });
  std::vector<AttributedGraph> graphs;
  graphs.reserve(d.size());
  for (auto& s : slots) graphs.push_back(std::move(*s));
  return GraphDataset(d.name(), std::move(graphs), d.task());
}

}  // namespace rings
