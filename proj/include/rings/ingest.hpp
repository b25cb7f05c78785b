#pragma once

// Readers and writers for graph datasets:
//  * TU Dortmund benchmark layout (DS_A.txt, DS_graph_indicator.txt, ...)
//  * canonical JSON-lines, one graph object per line
// plus seeded synthetic generators used by tests and the `gen` command.
//
// Both readers apply the same cleaning: self-loops are dropped, repeated
// pairs are merged, and every drop is counted in the ParseReport.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rings/core.hpp"
#include "rings/sampling.hpp"
#include "rings/util.hpp"

namespace rings {

struct ParseReport {
  std::size_t graphs_read = 0;
  std::size_t edges_dropped = 0;  // self-loops + exact repeats
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
  std::size_t reverse_merged = 0;  // (v,u) lines folded into an existing (u,v)
  std::vector<std::string> warnings;
};

struct TuOptions {
  /// Featureless datasets get one-hot degree columns instead of a constant 1.0.
  bool degree_onehot = false;
};

namespace detail {

// Accumulates undirected edges from directed lines, tracking drops.
class EdgeCollector {
 public:
  void add(NodeId a, NodeId b, ParseReport& report) {
    if (a == b) {
      ++report.self_loops;
      ++report.edges_dropped;
      return;
    }
    if (!directed_.insert({a, b}).second) {
      ++report.duplicates;
      ++report.edges_dropped;
      return;
    }
    if (!undirected_.insert(Edge(a, b)).second) ++report.reverse_merged;
  }
  std::vector<Edge> take() { return {undirected_.begin(), undirected_.end()}; }

 private:
  std::set<std::pair<NodeId, NodeId>> directed_;
  std::set<Edge> undirected_;
};

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

inline std::int64_t parse_int_or_throw(std::string_view field, const std::filesystem::path& file,
                                       std::size_t line_no) {
  auto v = parse_int(field);
  if (!v) {
    throw InputError(file.string() + ":" + std::to_string(line_no) + ": expected integer, got '" +
                     std::string(field) + "'");
  }
  return *v;
}

inline TaskKind infer_task(const std::vector<std::optional<Target>>& targets) {
  std::set<std::int64_t> classes;
  bool any = false, label_set = false, real = false;
  for (const auto& t : targets) {
    if (!t) continue;
    any = true;
    if (const auto* c = std::get_if<ClassTarget>(&*t)) classes.insert(c->label);
    if (std::holds_alternative<LabelSetTarget>(*t)) label_set = true;
    if (std::holds_alternative<RealTarget>(*t)) real = true;
  }
  if (!any) return TaskKind::none;
  if (label_set) return TaskKind::multi_label;
  if (real) return TaskKind::regression;
  return classes.size() <= 2 ? TaskKind::binary_class : TaskKind::multi_class;
}

}  // namespace detail

/// Reads `<dir>/<name>_A.txt` and `<dir>/<name>_graph_indicator.txt`, plus the
/// optional graph labels, node attributes and node labels.
inline std::pair<GraphDataset, ParseReport> parse_tu_dataset(const std::filesystem::path& dir,
                                                            const std::string& name,
                                                            const TuOptions& options = {}) {
  namespace fs = std::filesystem;
  ParseReport report;
  const fs::path a_path = dir / (name + "_A.txt");
  const fs::path gi_path = dir / (name + "_graph_indicator.txt");
  for (const auto& p : {a_path, gi_path}) {
    if (!fs::exists(p)) throw InputError("missing mandatory file " + p.string());
  }

  // Node -> (graph index, local id), in file order.
  const auto gi_lines = detail::read_lines(gi_path);
  std::vector<std::int64_t> graph_of_node;
  graph_of_node.reserve(gi_lines.size());
  std::vector<std::int64_t> graph_ids;  // distinct, order of first appearance
  std::map<std::int64_t, std::size_t> graph_index;
  std::vector<std::size_t> local_id(gi_lines.size());
  std::vector<std::size_t> graph_size;
  for (std::size_t i = 0; i < gi_lines.size(); ++i) {
    const std::int64_t gid = detail::parse_int_or_throw(gi_lines[i], gi_path, i + 1);
    auto [it, inserted] = graph_index.try_emplace(gid, graph_ids.size());
    if (inserted) {
      graph_ids.push_back(gid);
      graph_size.push_back(0);
    }
    graph_of_node.push_back(static_cast<std::int64_t>(it->second));
    local_id[i] = graph_size[it->second]++;
  }
  const std::size_t num_nodes = gi_lines.size();
  const std::size_t num_graphs = graph_ids.size();

  std::vector<detail::EdgeCollector> collectors(num_graphs);
  {
    std::ifstream in(a_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() != 2) {
        throw InputError(a_path.string() + ":" + std::to_string(line_no) +
                         ": expected 'u, v' edge line");
      }
      const std::int64_t a = detail::parse_int_or_throw(fields[0], a_path, line_no);
      const std::int64_t b = detail::parse_int_or_throw(fields[1], a_path, line_no);
      for (std::int64_t v : {a, b}) {
        if (v < 1 || static_cast<std::size_t>(v) > num_nodes) {
          throw InputError(a_path.string() + ":" + std::to_string(line_no) + ": node id " +
                           std::to_string(v) + " references no graph");
        }
      }
      const std::size_t ia = static_cast<std::size_t>(a - 1), ib = static_cast<std::size_t>(b - 1);
      if (graph_of_node[ia] != graph_of_node[ib]) {
        throw InputError(a_path.string() + ":" + std::to_string(line_no) +
                         ": edge joins nodes of different graphs");
      }
      collectors[static_cast<std::size_t>(graph_of_node[ia])].add(
          static_cast<NodeId>(local_id[ia]), static_cast<NodeId>(local_id[ib]), report);
    }
  }

  // Node features.
  std::vector<std::vector<double>> attributes;
  const fs::path attr_path = dir / (name + "_node_attributes.txt");
  const bool has_attributes = fs::exists(attr_path);
  std::size_t attr_dim = 0;
  if (has_attributes) {
    const auto lines = detail::read_lines(attr_path);
    if (lines.size() != num_nodes) {
      throw InputError(attr_path.string() + ": expected " + std::to_string(num_nodes) +
                       " rows, found " + std::to_string(lines.size()));
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::vector<double> row;
      for (auto f : split_fields(lines[i])) {
        auto v = parse_double(f);
        if (!v || !std::isfinite(*v)) {
          throw InputError(attr_path.string() + ":" + std::to_string(i + 1) +
                           ": bad attribute value '" + std::string(f) + "'");
        }
        row.push_back(*v);
      }
      if (i == 0) attr_dim = row.size();
      if (row.size() != attr_dim) {
        throw InputError(attr_path.string() + ":" + std::to_string(i + 1) +
                         ": ragged attribute row (" + std::to_string(row.size()) + " vs " +
                         std::to_string(attr_dim) + " columns)");
      }
      attributes.push_back(std::move(row));
    }
  }

  std::vector<std::int64_t> node_labels;
  std::vector<std::int64_t> label_values;
  const fs::path nl_path = dir / (name + "_node_labels.txt");
  const bool has_labels = fs::exists(nl_path);
  if (has_labels) {
    const auto lines = detail::read_lines(nl_path);
    if (lines.size() != num_nodes) {
      throw InputError(nl_path.string() + ": expected " + std::to_string(num_nodes) +
                       " rows, found " + std::to_string(lines.size()));
    }
    std::set<std::int64_t> distinct;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto fields = split_fields(lines[i]);
      node_labels.push_back(detail::parse_int_or_throw(fields[0], nl_path, i + 1));
      distinct.insert(node_labels.back());
    }
    label_values.assign(distinct.begin(), distinct.end());
  }

  std::vector<std::optional<Target>> targets(num_graphs);
  const fs::path gl_path = dir / (name + "_graph_labels.txt");
  if (fs::exists(gl_path)) {
    const auto lines = detail::read_lines(gl_path);
    if (lines.size() != num_graphs) {
      throw InputError(gl_path.string() + ": expected " + std::to_string(num_graphs) +
                       " labels, found " + std::to_string(lines.size()));
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (auto c = parse_int(lines[i])) {
        targets[i] = ClassTarget{*c};
      } else if (auto r = parse_double(lines[i])) {
        targets[i] = RealTarget{*r};
      } else {
        throw InputError(gl_path.string() + ":" + std::to_string(i + 1) + ": bad graph label");
      }
    }
  }

  // Degree one-hot needs the dataset-wide maximum degree.
  std::vector<std::vector<Edge>> edge_lists(num_graphs);
  std::size_t max_degree = 0;
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    edge_lists[gi] = collectors[gi].take();
    std::vector<std::size_t> deg(graph_size[gi], 0);
    for (const Edge& e : edge_lists[gi]) {
      ++deg[e.u];
      ++deg[e.v];
    }
    for (auto d : deg) max_degree = std::max(max_degree, d);
  }

  const bool featureless = !has_attributes && !has_labels;
  std::size_t k = attr_dim + label_values.size();
  if (featureless) k = options.degree_onehot ? max_degree + 1 : 1;
  if (featureless) {
    report.warnings.push_back(options.degree_onehot
                                  ? "no node features; using one-hot degree encoding"
                                  : "no node features; using constant column 1.0");
  }

  std::vector<Matrix> feats(num_graphs);
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    feats[gi] = Matrix::Zero(static_cast<Eigen::Index>(graph_size[gi]), static_cast<Eigen::Index>(k));
    if (featureless && !options.degree_onehot) feats[gi].setOnes();
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    Matrix& x = feats[static_cast<std::size_t>(graph_of_node[i])];
    const auto r = static_cast<Eigen::Index>(local_id[i]);
    for (std::size_t j = 0; j < attr_dim; ++j) x(r, static_cast<Eigen::Index>(j)) = attributes[i][j];
    if (has_labels) {
      const auto pos = std::lower_bound(label_values.begin(), label_values.end(), node_labels[i]) -
                       label_values.begin();
      x(r, static_cast<Eigen::Index>(attr_dim) + pos) = 1.0;
    }
  }
  if (featureless && options.degree_onehot) {
    for (std::size_t gi = 0; gi < num_graphs; ++gi) {
      std::vector<std::size_t> deg(graph_size[gi], 0);
      for (const Edge& e : edge_lists[gi]) {
        ++deg[e.u];
        ++deg[e.v];
      }
      for (std::size_t v = 0; v < deg.size(); ++v) {
        feats[gi](static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(deg[v])) = 1.0;
      }
    }
  }

  std::vector<AttributedGraph> graphs;
  graphs.reserve(num_graphs);
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    graphs.emplace_back(graph_ids[gi] - 1, graph_size[gi], std::move(edge_lists[gi]),
                        std::move(feats[gi]), targets[gi]);
  }
  report.graphs_read = graphs.size();
  const TaskKind task = detail::infer_task(targets);
  return {GraphDataset(name, std::move(graphs), task), report};
}

// ---------------------------------------------------------------------------
// JSON lines

namespace detail {

inline nlohmann::ordered_json target_to_json(const Target& t) {
  if (const auto* c = std::get_if<ClassTarget>(&t)) return c->label;
  if (const auto* s = std::get_if<LabelSetTarget>(&t)) return s->labels;
  return std::get<RealTarget>(t).value;
}

inline Target target_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return ClassTarget{j.get<std::int64_t>()};
  if (j.is_number_float()) return RealTarget{j.get<double>()};
  if (j.is_array()) {
    LabelSetTarget t;
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw InputError("label-set target must hold integers");
      t.labels.push_back(v.get<std::int64_t>());
    }
    return t;
  }
  throw InputError("target must be an integer, a real or a list of integers");
}

}  // namespace detail

inline nlohmann::ordered_json graph_to_json(const AttributedGraph& g) {
  nlohmann::ordered_json j;
  j["id"] = g.id();
  j["n"] = g.num_nodes();
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < g.features().rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < g.features().cols(); ++c) row.push_back(g.features()(i, c));
    rows.push_back(std::move(row));
  }
  j["features"] = std::move(rows);
  if (g.target()) j["target"] = detail::target_to_json(*g.target());
  return j;
}

/// Parses one JSONL object; `where` prefixes error messages.
inline AttributedGraph graph_from_json(const nlohmann::json& j, ParseReport& report,
                                       const std::string& where) {
  auto fail = [&](const std::string& msg) -> InputError { return InputError(where + ": " + msg); };
  if (!j.is_object()) throw fail("expected a JSON object");
  for (const char* key : {"id", "n", "edges", "features"}) {
    if (!j.contains(key)) throw fail(std::string("missing field '") + key + "'");
  }
  if (!j["id"].is_number_integer()) throw fail("'id' must be an integer");
  if (!j["n"].is_number_unsigned() || j["n"].get<std::uint64_t>() == 0) {
    throw fail("'n' must be a positive integer");
  }
  const auto n = j["n"].get<std::size_t>();
  const auto& jf = j["features"];
  if (!jf.is_array() || jf.size() != n) {
    throw fail("'features' must have n=" + std::to_string(n) + " rows");
  }
  std::size_t k = 0;
  Matrix x;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = jf[i];
    if (!row.is_array() || row.empty()) throw fail("feature row " + std::to_string(i) + " invalid");
    if (i == 0) {
      k = row.size();
      x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    }
    if (row.size() != k) throw fail("ragged feature row " + std::to_string(i));
    for (std::size_t c = 0; c < k; ++c) {
      if (!row[c].is_number()) throw fail("non-numeric feature value");
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  detail::EdgeCollector edges;
  const auto& je = j["edges"];
  if (!je.is_array()) throw fail("'edges' must be a list");
  for (const auto& e : je) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw fail("edge must be a pair of integers");
    }
    const auto u = e[0].get<std::int64_t>(), v = e[1].get<std::int64_t>();
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
      throw fail("edge [" + std::to_string(u) + "," + std::to_string(v) +
                 "] out of range for n=" + std::to_string(n));
    }
    edges.add(static_cast<NodeId>(u), static_cast<NodeId>(v), report);
  }
  std::optional<Target> target;
  if (j.contains("target") && !j["target"].is_null()) target = detail::target_from_json(j["target"]);
  try {
    return AttributedGraph(j["id"].get<GraphId>(), n, edges.take(), std::move(x), std::move(target));
  } catch (const InputError& e) {
    throw fail(e.what());
  }
}

/// Reads a JSONL dataset. The dataset name defaults to the file stem.
inline std::pair<GraphDataset, ParseReport> parse_jsonl(const std::filesystem::path& path,
                                                       std::string name = {}) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  if (name.empty()) name = path.stem().string();
  ParseReport report;
  std::vector<AttributedGraph> graphs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(where + ": malformed JSON (" + e.what() + ")");
    }
    graphs.push_back(graph_from_json(j, report, where));
  }
  report.graphs_read = graphs.size();
  std::vector<std::optional<Target>> targets;
  for (const auto& g : graphs) targets.push_back(g.target());
  const TaskKind task = detail::infer_task(targets);
  return {GraphDataset(std::move(name), std::move(graphs), task), report};
}

inline void write_jsonl(const GraphDataset& d, std::ostream& out) {
  for (const auto& g : d.graphs()) out << graph_to_json(g).dump() << '\n';
}

inline void write_jsonl(const GraphDataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_jsonl(d, out);
  if (!out) throw Error("I/O failure writing " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

/// Cliques joined in a cycle: node 0 of clique i is bridged to node 0 of
/// clique (i+1) mod c. Features are i.i.d. standard normal.
inline AttributedGraph gen_ring_of_cliques(std::size_t num_cliques, std::size_t clique_size,
                                           std::size_t feature_dim, std::uint64_t seed,
                                           GraphId id = 0) {
  if (num_cliques < 3) throw InputError("ring of cliques needs at least 3 cliques");
  if (clique_size < 2) throw InputError("clique size must be at least 2");
  if (feature_dim < 1) throw InputError("feature dimension must be at least 1");
  std::vector<Edge> edges;
  for (std::size_t c = 0; c < num_cliques; ++c) {
    const auto base = static_cast<NodeId>(c * clique_size);
    for (NodeId a = 0; a < clique_size; ++a) {
      for (NodeId b = a + 1; b < clique_size; ++b) edges.emplace_back(base + a, base + b);
    }
    const auto next = static_cast<NodeId>(((c + 1) % num_cliques) * clique_size);
    edges.emplace_back(base, next);
  }
  Rng rng(seed);
  const std::size_t n = num_cliques * clique_size;
  return AttributedGraph(id, n, std::move(edges), standard_normal_matrix(n, feature_dim, rng));
}

/// G(n, p) structure with standard normal features.
inline AttributedGraph gen_erdos_renyi(std::size_t n, double p, std::size_t feature_dim,
                                       std::uint64_t seed, GraphId id = 0) {
  if (n < 1) throw InputError("graph needs at least one node");
  if (feature_dim < 1) throw InputError("feature dimension must be at least 1");
  Rng rng(seed);
  auto edges = erdos_renyi_edges(n, p, rng);
  return AttributedGraph(id, n, std::move(edges), standard_normal_matrix(n, feature_dim, rng));
}

}  // namespace rings
