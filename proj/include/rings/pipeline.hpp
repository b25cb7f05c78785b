#pragma once

// Declarative run configuration and the command implementations behind the
// `rings` CLI. Every command writes into RunConfig::out and returns a process
// exit code: 0 success, 1 violated invariant. Input problems throw InputError.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rings/complement.hpp"
#include "rings/core.hpp"
#include "rings/ingest.hpp"
#include "rings/perturb.hpp"
#include "rings/report.hpp"
#include "rings/separability.hpp"
#include "rings/util.hpp"

namespace rings {

namespace fs = std::filesystem;

struct DatasetSource {
  std::string name;
  fs::path path;
  std::string format;  // "tu" or "jsonl"
  bool degree_onehot = false;
};

/// Published per-dataset results fed to the report instead of raw inputs.
struct PublishedSummary {
  std::string dataset;
  std::vector<std::pair<std::string, std::string>> orders;  // metric -> condensed order
  std::optional<Symbol> evaluation;
  std::optional<std::pair<double, double>> structure_diversity;  // (mean, sd)
  std::optional<std::pair<double, double>> feature_diversity;
};

struct RunConfig {
  std::vector<DatasetSource> datasets;
  std::vector<Mode> kinds{kAllModes.begin(), kAllModes.end()};
  ComplementarityConfig complementarity;
  double diversity_t = 1.0;
  SeparabilityConfig separability;
  std::optional<fs::path> performance;
  std::optional<fs::path> outcomes;
  std::string correlation_metric;  // empty: auroc if present, else the first metric
  std::vector<Mode> correlation_kinds{Mode::o, Mode::eg, Mode::cg, Mode::rg, Mode::cf, Mode::rf};
  std::vector<PublishedSummary> summaries;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: RINGS_THREADS or hardware concurrency
  fs::path out = "rings-out";
  bool check_duality = false;
};

// ---------------------------------------------------------------------------
// Loading

inline DatasetSource dataset_source(const fs::path& path, std::string name = {},
                                    std::string format = {}) {
  DatasetSource s;
  s.path = path;
  if (format.empty()) format = fs::is_directory(path) ? "tu" : "jsonl";
  if (format != "tu" && format != "jsonl") {
    throw InputError("unknown dataset format '" + format + "' (expected tu or jsonl)");
  }
  s.format = std::move(format);
  if (name.empty()) {
    name = s.format == "tu" ? fs::path(path).lexically_normal().filename().string()
                            : path.stem().string();
    if (name.empty()) name = fs::path(path).lexically_normal().parent_path().filename().string();
  }
  s.name = std::move(name);
  return s;
}

inline std::vector<Mode> parse_modes(const std::vector<std::string>& names) {
  std::vector<Mode> out;
  for (const auto& n : names) {
    const Mode m = parse_mode(n);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

namespace detail {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

inline std::string str_or_empty(const nlohmann::json& j, const char* key) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<std::string>() : std::string();
}

inline std::pair<double, double> mean_sd_pair(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw InputError(what + " must be [mean, sd]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

/// Parses a JSON run configuration. Relative paths resolve against `base`.
inline RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  RunConfig c;
  try {
    auto resolve = [&](const std::string& p) {
      const fs::path path(p);
      return path.is_absolute() ? path : base / path;
    };
    if (j.contains("datasets")) {
      for (const auto& d : j.at("datasets")) {
        if (d.is_string()) {
          c.datasets.push_back(dataset_source(resolve(d.get<std::string>())));
          continue;
        }
        std::string name, format;
        detail::read_opt(d, "name", name);
        detail::read_opt(d, "format", format);
        auto src = dataset_source(resolve(d.at("path").get<std::string>()), name, format);
        detail::read_opt(d, "degree_onehot", src.degree_onehot);
        c.datasets.push_back(std::move(src));
      }
    }
    if (j.contains("kinds")) c.kinds = parse_modes(j.at("kinds").get<std::vector<std::string>>());
    if (j.contains("complementarity")) {
      const auto& cj = j.at("complementarity");
      auto& cc = c.complementarity;
      if (auto s = detail::str_or_empty(cj, "structural_metric"); !s.empty()) {
        cc.structural.kind = structural_kind_from_string(s);
      }
      if (auto s = detail::str_or_empty(cj, "convention"); !s.empty()) {
        cc.structural.convention = convention_from_string(s);
      }
      if (auto s = detail::str_or_empty(cj, "feature_metric"); !s.empty()) {
        cc.feature = feature_metric_from_string(s);
      }
      detail::read_opt(cj, "p", cc.p);
      detail::read_opt(cj, "q", cc.q);
      detail::read_opt(cj, "t_values", cc.t_values);
      detail::read_opt(cj, "seeds", cc.random_seeds);
      detail::read_opt(cj, "random_feature_dim", cc.random_feature_dim);
      if (cj.contains("random_graph_p") && !cj.at("random_graph_p").is_null()) {
        cc.random_graph_p = cj.at("random_graph_p").get<double>();
      }
      detail::read_opt(cj, "pool_seeds", cc.pool_seeds);
      detail::read_opt(cj, "diversity_t", c.diversity_t);
    }
    if (j.contains("separability")) {
      const auto& sj = j.at("separability");
      auto& sc = c.separability;
      if (auto s = detail::str_or_empty(sj, "statistic"); !s.empty()) {
        sc.statistic = statistic_from_string(s);
      }
      detail::read_opt(sj, "n_perm", sc.n_perm);
      detail::read_opt(sj, "alpha", sc.alpha);
      std::string correction;
      detail::read_opt(sj, "correction", correction);
      if (!correction.empty()) {
        if (correction != "bonferroni" && correction != "none") {
          throw InputError("correction must be 'bonferroni' or 'none'");
        }
        sc.bonferroni = correction == "bonferroni";
      }
      detail::read_opt(sj, "metrics", sc.metrics);
      detail::read_opt(sj, "n_boot", sc.n_boot);
      detail::read_opt(sj, "level", sc.level);
    }
    if (auto p = detail::str_or_empty(j, "performance"); !p.empty()) c.performance = resolve(p);
    if (auto p = detail::str_or_empty(j, "outcomes"); !p.empty()) c.outcomes = resolve(p);
    detail::read_opt(j, "correlation_metric", c.correlation_metric);
    if (j.contains("correlation_kinds")) {
      c.correlation_kinds = parse_modes(j.at("correlation_kinds").get<std::vector<std::string>>());
    }
    if (j.contains("summaries")) {
      for (const auto& sj : j.at("summaries")) {
        PublishedSummary s;
        s.dataset = sj.at("dataset").get<std::string>();
        if (sj.contains("orders")) {
          for (const auto& [metric, order] : sj.at("orders").items()) {
            s.orders.emplace_back(metric, order.get<std::string>());
          }
        }
        if (auto eval = detail::str_or_empty(sj, "evaluation"); !eval.empty()) {
          s.evaluation = symbol_from_string(eval);
        }
        if (sj.contains("diversity")) {
          const auto& dj = sj.at("diversity");
          if (dj.contains("structure")) {
            s.structure_diversity = detail::mean_sd_pair(dj.at("structure"), "diversity.structure");
          }
          if (dj.contains("features")) {
            s.feature_diversity = detail::mean_sd_pair(dj.at("features"), "diversity.features");
          }
        }
        c.summaries.push_back(std::move(s));
      }
    }
    detail::read_opt(j, "seed", c.seed);
    detail::read_opt(j, "threads", c.threads);
    if (auto p = detail::str_or_empty(j, "out"); !p.empty()) c.out = resolve(p);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  }
  return c;
}

inline RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

inline std::pair<GraphDataset, ParseReport> load_dataset(const DatasetSource& s) {
  if (!fs::exists(s.path)) throw InputError("dataset path '" + s.path.string() + "' does not exist");
  if (s.format == "tu") return parse_tu_dataset(s.path, s.name, TuOptions{s.degree_onehot});
  return parse_jsonl(s.path, s.name);
}

/// Complementarity settings with the master seed folded into every random seed.
inline ComplementarityConfig effective_complementarity(const RunConfig& c) {
  ComplementarityConfig cc = c.complementarity;
  for (auto& s : cc.random_seeds) s += c.seed;
  return cc;
}

inline SeparabilityConfig effective_separability(const RunConfig& c) {
  SeparabilityConfig sc = c.separability;
  sc.seed = c.seed;
  sc.threads = c.threads;
  return sc;
}

namespace detail {

inline std::vector<std::pair<GraphDataset, ParseReport>> load_all(const RunConfig& c,
                                                                  std::ostream& log) {
  if (c.datasets.empty()) throw InputError("no datasets configured");
  std::vector<std::pair<GraphDataset, ParseReport>> out;
  for (const auto& s : c.datasets) {
    out.push_back(load_dataset(s));
    const auto& rep = out.back().second;
    for (const auto& w : rep.warnings) log << "warning: " << s.name << ": " << w << '\n';
    if (rep.edges_dropped) {
      log << "note: " << s.name << ": dropped " << rep.edges_dropped << " edge lines ("
          << rep.self_loops << " self-loops, " << rep.duplicates << " duplicates)\n";
    }
  }
  return out;
}

inline std::ofstream open_in(const RunConfig& c, const std::string& file, std::ostream& log) {
  fs::create_directories(c.out);
  const fs::path p = c.out / file;
  log << "writing " << p.string() << '\n';
  return open_output(p);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

inline int cmd_stats(const RunConfig& c, std::ostream& log) {
  const auto data = detail::load_all(c, log);
  auto os = detail::open_in(c, "stats.csv", log);
  os << "dataset,num_graphs,n_mean,n_sd,m_mean,m_sd,degree_mean,degree_sd,density_mean,density_sd\n";
  for (const auto& [d, rep] : data) {
    const DatasetStats s = dataset_stats(d);
    os << s.name << ',' << s.num_graphs << ',' << format_double(s.n.mean) << ','
       << format_double(s.n.sd) << ',' << format_double(s.m.mean) << ',' << format_double(s.m.sd)
       << ',' << format_double(s.degree.mean) << ',' << format_double(s.degree.sd) << ','
       << format_double(s.density.mean) << ',' << format_double(s.density.sd) << '\n';
  }
  return 0;
}

inline int cmd_perturb(const RunConfig& c, std::ostream& log) {
  const auto data = detail::load_all(c, log);
  fs::create_directories(c.out);
  for (const auto& [d, rep] : data) {
    for (Mode m : c.kinds) {
      const auto kind = c.complementarity.perturbation(m);
      const fs::path p = c.out / (d.name() + "." + std::string(mode_name(m)) + ".jsonl");
      log << "writing " << p.string() << '\n';
      write_jsonl(perturb_dataset(d, kind, c.seed, c.threads), p);
    }
  }
  return 0;
}

struct DualityViolation {
  GraphId graph_id = 0;
  double t = 0.0;
  Mode complete = Mode::cg;
  double gap = 0.0;
};

/// Per-graph |gamma_complete - (1 - gamma_empty)| above `tol`.
inline std::vector<DualityViolation> duality_violations(const DatasetComplementarity& r,
                                                        double tol = 1e-9) {
  std::map<std::tuple<GraphId, double, Mode>, double> v;
  for (const auto& rec : r.records) {
    if (!rec.seed) v[{rec.graph_id, rec.t, rec.kind}] = rec.value;
  }
  std::vector<DualityViolation> out;
  for (const auto& [key, value] : v) {
    const auto& [id, t, kind] = key;
    const Mode empty = kind == Mode::cg ? Mode::eg : kind == Mode::cf ? Mode::ef : Mode::o;
    if (empty == Mode::o) continue;
    auto it = v.find({id, t, empty});
    if (it == v.end()) continue;
    const double gap = std::abs(value - (1.0 - it->second));
    if (gap > tol) out.push_back({id, t, kind, gap});
  }
  return out;
}

inline int cmd_complement(const RunConfig& c, std::ostream& log) {
  const ComplementarityConfig cc = effective_complementarity(c);
  if (c.check_duality) {
    if (cc.p != 1.0 || cc.q != 1.0) throw InputError("--check-duality requires p = q = 1");
    const bool graph_pair = std::count(c.kinds.begin(), c.kinds.end(), Mode::eg) &&
                            std::count(c.kinds.begin(), c.kinds.end(), Mode::cg);
    const bool feature_pair = std::count(c.kinds.begin(), c.kinds.end(), Mode::ef) &&
                              std::count(c.kinds.begin(), c.kinds.end(), Mode::cf);
    if (!graph_pair && !feature_pair) {
      throw InputError("--check-duality needs kinds eg and cg, or ef and cf");
    }
  }
  const auto data = detail::load_all(c, log);
  int status = 0;
  for (const auto& [d, rep] : data) {
    const auto r = dataset_complementarity(d, c.kinds, cc, c.threads);
    for (const auto& w : r.warnings) log << "warning: " << d.name() << ": " << w << '\n';
    {
      auto os = detail::open_in(c, d.name() + ".complementarity.csv", log);
      write_complementarity_csv(r.records, os);
    }
    {
      auto os = detail::open_in(c, d.name() + ".complementarity_summary.csv", log);
      write_summary_csv(d.name(), r.summary, os);
    }
    if (c.check_duality) {
      const auto bad = duality_violations(r);
      for (const auto& v : bad) {
        log << "duality violation: " << d.name() << " graph " << v.graph_id << " t="
            << format_double(v.t) << " " << mode_name(v.complete) << " gap "
            << format_double(v.gap) << '\n';
      }
      if (!bad.empty()) status = 1;
      log << "duality check " << d.name() << ": " << (bad.empty() ? "ok" : "FAILED") << '\n';
    }
  }
  return status;
}

inline int cmd_diversity(const RunConfig& c, std::ostream& log) {
  const auto data = detail::load_all(c, log);
  const ComplementarityConfig cc = effective_complementarity(c);
  auto os = detail::open_in(c, "diversity.csv", log);
  os << "dataset,t,structure_mean,structure_sd,features_mean,features_sd,"
        "structure_mean_symbol,structure_sd_symbol,features_mean_symbol,features_sd_symbol\n";
  for (const auto& [d, rep] : data) {
    const auto s = make_diversity_summary(d.name(), dataset_diversity(d, cc, c.diversity_t, c.threads));
    os << d.name() << ',' << format_double(c.diversity_t) << ',' << format_double(s.structure_mean)
       << ',' << format_double(s.structure_sd) << ',' << format_double(s.features_mean) << ','
       << format_double(s.features_sd) << ',' << to_string(s.structure_mean_symbol) << ','
       << to_string(s.structure_sd_symbol) << ',' << to_string(s.features_mean_symbol) << ','
       << to_string(s.features_sd_symbol) << '\n';
  }
  return 0;
}

inline int cmd_separability(const RunConfig& c, std::ostream& log) {
  if (!c.performance) throw InputError("separability needs a performance CSV (--performance)");
  const auto records = load_performance_records(*c.performance);
  const SeparabilityConfig sc = effective_separability(c);
  Json all = Json::array();
  std::string text;
  for (const auto& name : datasets_in(records)) {
    const auto r = evaluate_dataset(records, name, sc);
    Json j;
    j["dataset"] = name;
    j["statistic"] = std::string(to_string(sc.statistic));
    j["alpha"] = sc.alpha;
    j["correction"] = sc.bonferroni ? "bonferroni" : "none";
    j.update(to_json(r, std::nullopt));
    all.push_back(std::move(j));
    for (const auto& m : r.per_metric) {
      for (const auto& w : m.warnings) log << "warning: " << name << ": " << m.metric << ": " << w << '\n';
      text += name + "\t" + m.metric + "\t" + m.condensed + "\n";
    }
    for (const auto& w : r.informativeness.warnings) log << "warning: " << name << ": " << w << '\n';
    text += name + "\tstructure\t" + std::string(to_string(r.informativeness.structure)) + "\n";
    text += name + "\tfeatures\t" + std::string(to_string(r.informativeness.features)) + "\n";
    text += name + "\tevaluation\t" + std::string(to_string(r.evaluation)) + "\n";
  }
  {
    auto os = detail::open_in(c, "separability.json", log);
    os << all.dump(2) << '\n';
  }
  {
    auto os = detail::open_in(c, "separability.txt", log);
    os << text;
  }
  if (c.outcomes) {
    const auto outcomes = load_graph_outcomes(*c.outcomes);
    std::set<std::string> names;
    for (const auto& r : outcomes) names.insert(r.dataset);
    auto os = detail::open_in(c, "graph_agreement.csv", log);
    os << "dataset,reference,kind,runs,jaccard,asymmetric\n";
    for (const auto& name : names) {
      for (Mode m : kAllModes) {
        if (m == Mode::o) continue;
        const auto g = graph_agreement(outcomes, name, Mode::o, m);
        if (!g) continue;
        os << name << ",o," << mode_name(m) << ',' << g->runs << ',' << format_double(g->jaccard) << ','
           << format_double(g->asymmetric) << '\n';
      }
    }
  }
  return 0;
}

namespace detail {

inline std::string pick_correlation_metric(const RunConfig& c,
                                           const std::vector<PerformanceRecord>& records,
                                           const std::string& dataset) {
  if (!c.correlation_metric.empty()) return c.correlation_metric;
  std::set<std::string> names;
  for (const auto& r : records) {
    if (r.dataset == dataset && r.metric != "loss") names.insert(r.metric);
  }
  if (names.count("auroc")) return "auroc";
  return names.empty() ? std::string() : *names.begin();
}

}  // namespace detail

/// Builds one report per dataset named by a data source, the performance
/// records, or a published summary, in that order of first appearance.
inline std::vector<DatasetReport> build_reports(const RunConfig& c, std::ostream& log) {
  std::vector<std::string> names;
  auto note = [&](const std::string& n) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  };
  std::map<std::string, GraphDataset> data;
  for (const auto& s : c.datasets) {
    auto [d, rep] = load_dataset(s);
    for (const auto& w : rep.warnings) log << "warning: " << s.name << ": " << w << '\n';
    note(d.name());
    data.emplace(d.name(), std::move(d));
  }
  std::vector<PerformanceRecord> records;
  if (c.performance) {
    records = load_performance_records(*c.performance);
    for (const auto& n : datasets_in(records)) note(n);
  }
  std::map<std::string, const PublishedSummary*> published;
  for (const auto& s : c.summaries) {
    note(s.dataset);
    published[s.dataset] = &s;
  }
  if (names.empty()) throw InputError("report needs datasets, performance records or summaries");

  const ComplementarityConfig cc = effective_complementarity(c);
  const SeparabilityConfig sc = effective_separability(c);
  std::vector<DatasetReport> reports;
  for (const auto& name : names) {
    DatasetReport r;
    r.dataset = name;
    const PublishedSummary* pub = published.count(name) ? published[name] : nullptr;
    if (auto it = data.find(name); it != data.end()) {
      const GraphDataset& d = it->second;
      r.stats = dataset_stats(d);
      r.complementarity = dataset_complementarity(d, c.kinds, cc, c.threads);
      r.warnings.insert(r.warnings.end(), r.complementarity->warnings.begin(),
                        r.complementarity->warnings.end());
      r.diversity = make_diversity_summary(name, dataset_diversity(d, cc, c.diversity_t, c.threads));
    } else {
      r.warnings.push_back("no graph data: stats and complementarity omitted");
      if (pub && pub->structure_diversity && pub->feature_diversity) {
        r.diversity = make_diversity_summary(name, pub->structure_diversity->first,
                                             pub->structure_diversity->second,
                                             pub->feature_diversity->first,
                                             pub->feature_diversity->second);
      }
    }
    const bool has_records = std::any_of(records.begin(), records.end(),
                                         [&](const auto& rec) { return rec.dataset == name; });
    if (has_records) {
      r.separability = evaluate_dataset(records, name, sc);
    } else if (pub && !pub->orders.empty()) {
      r.separability = separability_from_orders(name, pub->orders);
    }
    if (pub && pub->evaluation) r.evaluation_override = pub->evaluation;
    if (r.separability && r.evaluation_override && *r.evaluation_override != r.separability->evaluation) {
      r.warnings.push_back("published evaluation " + std::string(to_string(*r.evaluation_override)) +
                           " differs from derived " +
                           std::string(to_string(r.separability->evaluation)));
    }
    if (r.complementarity && has_records) {
      const std::string metric = detail::pick_correlation_metric(c, records, name);
      if (!metric.empty()) {
        r.correlations = complementarity_vs_performance(*r.complementarity, records, name, metric,
                                                        c.correlation_kinds, r.warnings);
      }
    } else {
      r.warnings.push_back("correlations omitted: needs both graph data and performance records");
    }
    classify(r);
    reports.push_back(std::move(r));
  }
  return reports;
}

inline int cmd_report(const RunConfig& c, std::ostream& log) {
  const auto reports = build_reports(c, log);
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) log << "warning: " << r.dataset << ": " << w << '\n';
    for (const auto& p : emit_report(r, c.out)) log << "writing " << p.string() << '\n';
  }
  auto os = detail::open_in(c, "taxonomy.csv", log);
  os << "dataset,evaluation,structural_diversity,action\n";
  for (const auto& r : reports) {
    std::optional<Symbol> eval = r.evaluation_override;
    if (!eval && r.separability) eval = r.separability->evaluation;
    os << r.dataset << ',' << (eval ? std::string(to_string(*eval)) : "") << ','
       << (r.diversity ? std::string(to_string(r.diversity->structure_mean_symbol)) : "") << ','
       << (r.taxonomy ? std::string(to_string(r.taxonomy->action)) : "") << '\n';
  }
  return 0;
}

struct GenOptions {
  std::string type = "ring-of-cliques";  // or "er"
  std::size_t count = 10;
  std::size_t num_cliques = 4;
  std::size_t clique_size = 4;
  std::size_t nodes = 20;
  double p = 0.2;
  std::size_t feature_dim = 4;
  std::string name = "synthetic";
};

inline int cmd_gen(const RunConfig& c, const GenOptions& g, std::ostream& log) {
  if (g.count < 1) throw InputError("--count must be >= 1");
  std::vector<AttributedGraph> graphs;
  for (std::size_t i = 0; i < g.count; ++i) {
    const auto id = static_cast<GraphId>(i);
    const std::uint64_t s = graph_seed(c.seed, g.name, id);
    if (g.type == "ring-of-cliques") {
      graphs.push_back(gen_ring_of_cliques(g.num_cliques, g.clique_size, g.feature_dim, s, id));
    } else if (g.type == "er") {
      graphs.push_back(gen_erdos_renyi(g.nodes, g.p, g.feature_dim, s, id));
    } else {
      throw InputError("unknown generator '" + g.type + "' (expected ring-of-cliques or er)");
    }
  }
  fs::create_directories(c.out);
  const fs::path p = c.out / (g.name + ".jsonl");
  log << "writing " << p.string() << '\n';
  write_jsonl(GraphDataset(g.name, std::move(graphs)), p);
  return 0;
}

}  // namespace rings
