#pragma once

// Metric-space comparison, mode complementarity and mode diversity.
//
// Disconnected graphs are split into blocks: every connected component with
// at least one edge is a block, and all isolated nodes together form one
// further block whose structural space is trivial. A block of a single node
// carries no pairwise distances and is left out; block weights are
// renormalized over the covered nodes. This keeps the duality between empty
// and complete perturbations exact on every graph.

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rings/core.hpp"
#include "rings/lift.hpp"
#include "rings/perturb.hpp"
#include "rings/util.hpp"

namespace rings {

// ---------------------------------------------------------------------------
// Comparison

/// Mean-normalized L_{p,q} norm over the off-diagonal entries:
/// ( (1/n) sum_i ( (1/(n-1)) sum_j |D_ij|^p )^{q/p} )^{1/q}.
/// Coincides with the n(n-1)-normalized form when p == q and maps the
/// discrete matrix to exactly 1 for every (p, q).
inline double lpq_norm(const Matrix& d, double p, double q) {
  if (d.rows() != d.cols()) throw InputError("lpq_norm needs a square matrix");
  if (!(p >= 1.0) || !(q >= 1.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw InputError("lpq_norm orders must be finite and >= 1");
  }
  const Eigen::Index n = d.rows();
  if (n < 2) throw InputError("lpq_norm needs n >= 2");
  const double inner = 1.0 / static_cast<double>(n - 1);
  double outer = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = std::abs(d(i, j));
      row += p == 1.0 ? a : std::pow(a, p);
    }
    row *= inner;
    outer += p == q ? row : std::pow(row, q / p);
  }
  outer /= static_cast<double>(n);
  return q == 1.0 ? outer : std::pow(outer, 1.0 / q);
}

/// L_{p,q} distance between two diameter-normalized spaces on the same nodes.
inline double compare_spaces(const DistanceMatrix& a, const DistanceMatrix& b, double p, double q) {
  if (a.size() != b.size()) throw InputError("compare_spaces: size mismatch");
  if (a.diameter() > 1.0 || b.diameter() > 1.0) {
    throw InputError("compare_spaces expects diameter-normalized inputs");
  }
  return lpq_norm(a.values() - b.values(), p, q);
}

// ---------------------------------------------------------------------------
// Configuration and records

struct ComplementarityConfig {
  StructuralMetric structural;
  FeatureMetric feature = FeatureMetric::euclidean;
  double p = 1.0;
  double q = 1.0;
  std::vector<double> t_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::uint64_t> random_seeds = {0, 2, 4, 8, 16};
  std::size_t random_feature_dim = 10;
  std::optional<double> random_graph_p;
  bool pool_seeds = false;

  void validate() const {
    if (!(p >= 1.0 && std::isfinite(p)) || !(q >= 1.0 && std::isfinite(q))) {
      throw InputError("norm orders p, q must be finite and >= 1");
    }
    if (structural.uses_time()) {
      if (t_values.empty()) throw InputError("at least one t value is required");
      for (double t : t_values) {
        if (!(t > 0.0) || !std::isfinite(t)) throw InputError("t values must be positive");
        if (structural.kind == StructuralKind::diffusion && std::floor(t) != t) {
          throw InputError("diffusion t values must be integers");
        }
      }
    }
    if (random_feature_dim < 1) throw InputError("random feature dimension must be >= 1");
    if (random_graph_p && !(*random_graph_p >= 0.0 && *random_graph_p <= 1.0)) {
      throw InputError("random graph edge probability must lie in [0,1]");
    }
  }

  /// The time grid actually evaluated; t-independent metrics use {0}.
  std::vector<double> times() const {
    return structural.uses_time() ? t_values : std::vector<double>{0.0};
  }

  PerturbationKind perturbation(Mode m) const {
    PerturbationKind k = PerturbationKind::of(m);
    k.feature_dim = random_feature_dim;
    k.edge_probability = random_graph_p;
    return k;
  }
};

struct ComplementarityRecord {
  std::string dataset;
  GraphId graph_id = 0;
  Mode kind = Mode::o;
  double t = 0.0;
  std::optional<std::uint64_t> seed;  // set only for random kinds
  double value = 0.0;

  friend bool operator==(const ComplementarityRecord&, const ComplementarityRecord&) = default;
};

// ---------------------------------------------------------------------------
// Single-graph complementarity

/// Blocks over which complementarity is averaged.
inline std::vector<std::vector<NodeId>> complementarity_blocks(const AttributedGraph& g) {
  std::vector<std::vector<NodeId>> blocks;
  std::vector<NodeId> isolated;
  for (auto& comp : connected_components(g)) {
    if (comp.size() == 1) {
      isolated.push_back(comp.front());
    } else {
      blocks.push_back(std::move(comp));
    }
  }
  if (isolated.size() >= 2) blocks.push_back(std::move(isolated));
  return blocks;
}

/// Complementarity of `g` at each of cfg.times(). Graphs without any block
/// (n = 1) score 0 and set `*degenerate`.
inline std::vector<double> complementarity_profile(const AttributedGraph& g,
                                                   const ComplementarityConfig& cfg,
                                                   bool* degenerate = nullptr) {
  const std::vector<double> times = cfg.times();
  std::vector<double> out(times.size(), 0.0);
  const auto blocks = complementarity_blocks(g);
  if (degenerate) *degenerate = blocks.empty();
  if (blocks.empty()) return out;

  std::size_t covered = 0;
  for (const auto& b : blocks) covered += b.size();

  for (const auto& nodes : blocks) {
    const AttributedGraph sub = induced_subgraph(g, nodes);
    const double w = static_cast<double>(nodes.size()) / static_cast<double>(covered);
    const DistanceMatrix df = normalize_diameter(feature_distance(sub.features(), cfg.feature));

    auto add = [&](std::size_t k, const DistanceMatrix& ds) {
      out[k] += w * compare_spaces(normalize_diameter(ds), df, cfg.p, cfg.q);
    };
    if (sub.num_edges() == 0) {
      const DistanceMatrix zero = DistanceMatrix::zeros(nodes.size());
      for (std::size_t k = 0; k < times.size(); ++k) add(k, zero);
    } else if (cfg.structural.kind == StructuralKind::diffusion ||
               cfg.structural.kind == StructuralKind::heat_kernel) {
      const LaplacianSpectrum spectrum(sub);
      for (std::size_t k = 0; k < times.size(); ++k) {
        add(k, cfg.structural.kind == StructuralKind::diffusion
                   ? spectrum.diffusion(static_cast<int>(times[k]), cfg.structural.convention)
                   : spectrum.heat_kernel(times[k]));
      }
    } else {
      const DistanceMatrix ds = structural_distance(sub, cfg.structural);
      for (std::size_t k = 0; k < times.size(); ++k) add(k, ds);
    }
  }
  // Weighted means of values in [0,1]; clamp the last-bit overshoot.
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

inline double complementarity(const AttributedGraph& g, const ComplementarityConfig& cfg, double t) {
  ComplementarityConfig one = cfg;
  one.t_values = {t};
  return complementarity_profile(g, one).front();
}

/// Complementarity at the first configured time.
inline double complementarity(const AttributedGraph& g, const ComplementarityConfig& cfg) {
  return complementarity_profile(g, cfg).front();
}

inline double perturbed_complementarity(const AttributedGraph& g, const PerturbationKind& kind,
                                        const ComplementarityConfig& cfg, std::uint64_t seed,
                                        double t) {
  return complementarity(perturb_graph(g, kind, seed), cfg, t);
}

enum class DiversityMode { structure, features };

inline double diversity_from_gamma(double gamma) { return 1.0 - std::abs(1.0 - 2.0 * gamma); }

/// Structure diversity empties the features; feature diversity empties the graph.
inline double mode_diversity(const AttributedGraph& g, DiversityMode mode,
                             const ComplementarityConfig& cfg, double t) {
  const Mode m = mode == DiversityMode::structure ? Mode::ef : Mode::eg;
  return diversity_from_gamma(perturbed_complementarity(g, PerturbationKind::of(m), cfg, 0, t));
}

// ---------------------------------------------------------------------------
// Dataset aggregation

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  bool sd_defined = false;
  double p025 = 0.0;
  double p975 = 0.0;
};

inline SummaryStats summarize(std::vector<double> xs) {
  const MeanSd ms = mean_sd(xs);
  std::sort(xs.begin(), xs.end());
  return {xs.size(), ms.mean, ms.sd, ms.sd_defined, quantile_sorted(xs, 0.025),
          quantile_sorted(xs, 0.975)};
}

struct ComplementaritySummary {
  Mode kind = Mode::o;
  double t = 0.0;
  SummaryStats stats;
};

struct DatasetComplementarity {
  std::vector<ComplementarityRecord> records;
  std::vector<ComplementaritySummary> summary;  // ordered by kind list, then t
  std::vector<std::string> warnings;

  const ComplementaritySummary* find(Mode kind, double t) const {
    for (const auto& s : summary) {
      if (s.kind == kind && s.t == t) return &s;
    }
    return nullptr;
  }
};

/// Records for every graph x kind x (seed) x t. Random kinds use per-graph
/// seeds derived from each configured seed; their values are averaged per
/// graph before summarizing unless cfg.pool_seeds is set.
inline DatasetComplementarity dataset_complementarity(const GraphDataset& d,
                                                      const std::vector<Mode>& kinds,
                                                      const ComplementarityConfig& cfg,
                                                      unsigned threads = 1) {
  cfg.validate();
  if (d.size() == 0) throw InputError("dataset " + d.name() + " is empty");
  if (kinds.empty()) throw InputError("no perturbation kinds requested");
  for (Mode m : kinds) {
    if (is_random(m) && cfg.random_seeds.empty()) {
      throw InputError("random perturbation requested without seeds");
    }
  }
  const std::vector<double> times = cfg.times();

  struct PerGraph {
    std::vector<ComplementarityRecord> records;
    bool degenerate = false;
  };
  std::vector<PerGraph> slots(d.size());
  parallel_for(d.size(), threads, [&](std::size_t i) {
    const AttributedGraph& g = d.graphs()[i];
    PerGraph& slot = slots[i];
    for (Mode m : kinds) {
      const PerturbationKind kind = cfg.perturbation(m);
      std::vector<std::optional<std::uint64_t>> seeds;
      if (is_random(m)) {
        seeds.assign(cfg.random_seeds.begin(), cfg.random_seeds.end());
      } else {
        seeds.push_back(std::nullopt);
      }
      for (const auto& s : seeds) {
        const std::uint64_t gs = s ? graph_seed(*s, d.name(), g.id()) : 0;
        bool degenerate = false;
        const auto values = complementarity_profile(perturb_graph(g, kind, gs), cfg, &degenerate);
        slot.degenerate = slot.degenerate || degenerate;
        for (std::size_t k = 0; k < times.size(); ++k) {
          slot.records.push_back({d.name(), g.id(), m, times[k], s, values[k]});
        }
      }
    }
  });

  DatasetComplementarity out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].degenerate) {
      out.warnings.push_back("graph " + std::to_string(d.graphs()[i].id()) +
                             " has a single node; complementarity set to 0");
    }
    for (auto& r : slots[i].records) out.records.push_back(std::move(r));
  }

  for (Mode m : kinds) {
    for (double t : times) {
      std::vector<double> values;
      if (is_random(m) && !cfg.pool_seeds) {
        std::map<GraphId, std::pair<double, std::size_t>> acc;
        std::vector<GraphId> order;
        for (const auto& r : out.records) {
          if (r.kind != m || r.t != t) continue;
          auto [it, inserted] = acc.try_emplace(r.graph_id, 0.0, 0);
          if (inserted) order.push_back(r.graph_id);
          it->second.first += r.value;
          it->second.second += 1;
        }
        for (GraphId id : order) {
          const auto& [sum, n] = acc[id];
          values.push_back(sum / static_cast<double>(n));
        }
      } else {
        for (const auto& r : out.records) {
          if (r.kind == m && r.t == t) values.push_back(r.value);
        }
      }
      out.summary.push_back({m, t, summarize(std::move(values))});
    }
  }
  return out;
}

/// Per-graph mode diversity summary over a dataset.
struct DiversityStats {
  SummaryStats structure;
  SummaryStats features;
  std::vector<double> structure_values;  // per graph, dataset order
  std::vector<double> feature_values;
};

inline DiversityStats dataset_diversity(const GraphDataset& d, const ComplementarityConfig& cfg,
                                        double t, unsigned threads = 1) {
  if (d.size() == 0) throw InputError("dataset " + d.name() + " is empty");
  DiversityStats out;
  out.structure_values.resize(d.size());
  out.feature_values.resize(d.size());
  parallel_for(d.size(), threads, [&](std::size_t i) {
    const AttributedGraph& g = d.graphs()[i];
    out.structure_values[i] = mode_diversity(g, DiversityMode::structure, cfg, t);
    out.feature_values[i] = mode_diversity(g, DiversityMode::features, cfg, t);
  });
  out.structure = summarize(out.structure_values);
  out.features = summarize(out.feature_values);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_complementarity_csv(const std::vector<ComplementarityRecord>& records,
                                      std::ostream& os) {
  os << "dataset,graph_id,kind,t,seed,value\n";
  for (const auto& r : records) {
    os << r.dataset << ',' << r.graph_id << ',' << mode_name(r.kind) << ',' << format_double(r.t)
       << ',' << (r.seed ? std::to_string(*r.seed) : std::string()) << ','
       << format_double(r.value) << '\n';
  }
}

inline void write_summary_csv(const std::string& dataset,
                              const std::vector<ComplementaritySummary>& summary, std::ostream& os) {
  os << "dataset,kind,t,count,mean,sd,p2.5,p97.5\n";
  for (const auto& s : summary) {
    os << dataset << ',' << mode_name(s.kind) << ',' << format_double(s.t) << ','
       << s.stats.count << ',' << format_double(s.stats.mean) << ','
       << format_double(s.stats.sd) << ',' << format_double(s.stats.p025) << ','
       << format_double(s.stats.p975) << '\n';
  }
}

}  // namespace rings
