#pragma once

// Diversity bins, dataset taxonomy, correlation analysis and report
// emission. Reports are deterministic: fixed key order and fixed float
// formatting.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "rings/complement.hpp"
#include "rings/core.hpp"
#include "rings/separability.hpp"
#include "rings/util.hpp"

namespace rings {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Diversity bins

/// Equal-width bins on [0,1], left-closed; the last bin includes 1.
inline Symbol mean_bin(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw InputError("diversity mean must lie in [0,1]");
  if (mu < 0.2) return Symbol::very_low;
  if (mu < 0.4) return Symbol::low;
  if (mu < 0.6) return Symbol::medium;
  if (mu < 0.8) return Symbol::high;
  return Symbol::very_high;
}

/// Brackets [0,.05), [.05,.1), [.1,.15), [.15,.2), [.2,inf).
inline Symbol sd_bin(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("diversity sd must be >= 0");
  if (sigma < 0.05) return Symbol::very_low;
  if (sigma < 0.1) return Symbol::low;
  if (sigma < 0.15) return Symbol::medium;
  if (sigma < 0.2) return Symbol::high;
  return Symbol::very_high;
}

inline std::pair<Symbol, Symbol> diversity_bins(double mu, double sigma) {
  return {mean_bin(mu), sd_bin(sigma)};
}

struct DiversitySummary {
  std::string dataset;
  double structure_mean = 0.0, structure_sd = 0.0;
  double features_mean = 0.0, features_sd = 0.0;
  Symbol structure_mean_symbol{}, structure_sd_symbol{};
  Symbol features_mean_symbol{}, features_sd_symbol{};
};

inline DiversitySummary make_diversity_summary(const std::string& dataset, double s_mu, double s_sd,
                                               double f_mu, double f_sd) {
  DiversitySummary d{dataset, s_mu, s_sd, f_mu, f_sd};
  std::tie(d.structure_mean_symbol, d.structure_sd_symbol) = diversity_bins(s_mu, s_sd);
  std::tie(d.features_mean_symbol, d.features_sd_symbol) = diversity_bins(f_mu, f_sd);
  return d;
}

inline DiversitySummary make_diversity_summary(const std::string& dataset, const DiversityStats& s) {
  return make_diversity_summary(dataset, s.structure.mean, s.structure.sd, s.features.mean,
                                s.features.sd);
}

// ---------------------------------------------------------------------------
// Taxonomy

enum class TaxonomyAction { keep, realign, deprecate_structural, deprecate_full };

inline std::string_view to_string(TaxonomyAction a) {
  switch (a) {
    case TaxonomyAction::keep: return "Keep";
    case TaxonomyAction::realign: return "Realign";
    case TaxonomyAction::deprecate_structural: return "Deprecate-structural";
    case TaxonomyAction::deprecate_full: return "Deprecate-full";
  }
  return "Keep";
}

/// "High" means the middle symbol or above.
inline bool is_high(Symbol s) { return s >= Symbol::medium; }

struct TaxonomyVerdict {
  std::string dataset;
  TaxonomyAction action = TaxonomyAction::keep;
  bool separability_high = false;
  bool diversity_high = false;
};

inline TaxonomyVerdict taxonomy_classify(const std::string& dataset, Symbol evaluation,
                                         Symbol structural_diversity) {
  TaxonomyVerdict v{dataset, TaxonomyAction::keep, is_high(evaluation),
                    is_high(structural_diversity)};
  if (v.separability_high) {
    v.action = v.diversity_high ? TaxonomyAction::keep : TaxonomyAction::deprecate_structural;
  } else {
    v.action = v.diversity_high ? TaxonomyAction::realign : TaxonomyAction::deprecate_full;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Correlations

/// Average ranks (1-based) with ties sharing their mean rank.
inline std::vector<double> midranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && x[idx[j]] == x[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) r[idx[k]] = rank;
    i = j;
  }
  return r;
}

namespace detail {
inline void check_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("correlation: length mismatch");
  if (x.size() < 3) throw InputError("correlation needs at least 3 pairs");
}
}  // namespace detail

/// Unset when either vector has zero variance.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  detail::check_pairs(x, y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  detail::check_pairs(x, y);
  return pearson(midranks(x), midranks(y));
}

/// Kendall tau-b.
inline std::optional<double> kendall(const std::vector<double>& x, const std::vector<double>& y) {
  detail::check_pairs(x, y);
  std::int64_t concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tie_x;
      } else if (dy == 0.0) {
        ++tie_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n1 = static_cast<double>(concordant + discordant + tie_y);  // pairs untied in x
  const double n2 = static_cast<double>(concordant + discordant + tie_x);  // pairs untied in y
  if (n1 == 0.0 || n2 == 0.0) return std::nullopt;
  return static_cast<double>(concordant - discordant) / std::sqrt(n1 * n2);
}

/// Five equal-width bins on [-1,1]; the last includes 1.
inline Symbol correlation_symbol(double r) {
  if (!(r >= -1.0 && r <= 1.0)) throw InputError("correlation must lie in [-1,1]");
  if (r < -0.6) return Symbol::very_low;
  if (r < -0.2) return Symbol::low;
  if (r < 0.2) return Symbol::medium;
  if (r < 0.6) return Symbol::high;
  return Symbol::very_high;
}

struct CorrelationPoint {
  Mode kind = Mode::o;
  double t = 0.0;
  double complementarity = 0.0;
  double performance = 0.0;
};

struct CorrelationResult {
  std::string metric;
  std::vector<CorrelationPoint> points;
  std::optional<double> pearson, spearman, kendall;
};

inline CorrelationResult correlations(const std::vector<double>& x, const std::vector<double>& y) {
  CorrelationResult r;
  r.pearson = rings::pearson(x, y);
  r.spearman = rings::spearman(x, y);
  r.kendall = rings::kendall(x, y);
  return r;
}

/// One point per (kind, t) that has both a complementarity summary and a
/// performance mean under `metric` for the kind's best model.
inline std::optional<CorrelationResult> complementarity_vs_performance(
    const DatasetComplementarity& comp, const std::vector<PerformanceRecord>& records,
    const std::string& dataset, const std::string& metric, const std::vector<Mode>& kinds,
    std::vector<std::string>& warnings) {
  CorrelationResult out;
  out.metric = metric;
  std::vector<double> xs, ys;
  for (Mode m : kinds) {
    bool has = false;
    for (const auto& r : records) {
      if (r.dataset == dataset && r.kind == m && r.metric == metric) {
        has = true;
        break;
      }
    }
    if (!has) continue;
    const ModelId best = select_best_model(records, dataset, m, metric);
    const double perf = mean_sd(model_sample(records, dataset, m, best, metric)).mean;
    for (const auto& s : comp.summary) {
      if (s.kind != m) continue;
      out.points.push_back({m, s.t, s.stats.mean, perf});
      xs.push_back(s.stats.mean);
      ys.push_back(perf);
    }
  }
  if (xs.size() < 3) {
    warnings.push_back("correlations need >= 3 (kind, t) points with both complementarity and '" +
                       metric + "' performance; section omitted");
    return std::nullopt;
  }
  const CorrelationResult c = correlations(xs, ys);
  out.pearson = c.pearson;
  out.spearman = c.spearman;
  out.kendall = c.kendall;
  if (!out.pearson) warnings.push_back("correlation undefined: zero variance");
  return out;
}

// ---------------------------------------------------------------------------
// Separability from published orderings

/// Builds the informativeness/evaluation part of a separability section from
/// condensed orders such as {"accuracy", "o > cg/rg > eg"}.
inline DatasetSeparability separability_from_orders(
    const std::string& dataset, const std::vector<std::pair<std::string, std::string>>& orders) {
  DatasetSeparability out;
  out.dataset = dataset;
  std::vector<ModeGroups> groups;
  for (const auto& [metric, text] : orders) {
    SeparabilityResult r;
    r.dataset = dataset;
    r.metric = metric;
    r.groups = parse_condensed(text);
    for (const auto& g : r.groups) r.modes.insert(r.modes.end(), g.begin(), g.end());
    r.condensed = render_condensed(r.groups);
    groups.push_back(r.groups);
    out.per_metric.push_back(std::move(r));
  }
  out.informativeness = mode_informativeness(groups);
  out.score = evaluation_score(out.informativeness.structure, out.informativeness.features);
  out.evaluation = evaluation_symbol(out.score);
  return out;
}

// ---------------------------------------------------------------------------
// Report assembly

struct DatasetReport {
  std::string dataset;
  std::optional<DatasetStats> stats;
  std::optional<DatasetComplementarity> complementarity;
  std::optional<DiversitySummary> diversity;
  std::optional<DatasetSeparability> separability;
  std::optional<Symbol> evaluation_override;  // published symbol, when given
  std::optional<CorrelationResult> correlations;
  std::optional<TaxonomyVerdict> taxonomy;
  std::vector<std::string> warnings;
};

/// Fills `taxonomy` from the separability evaluation and the structural
/// diversity mean, warning when either input is missing.
inline void classify(DatasetReport& r) {
  std::optional<Symbol> eval = r.evaluation_override;
  if (!eval && r.separability) eval = r.separability->evaluation;
  if (!eval) r.warnings.push_back("taxonomy omitted: no separability results");
  if (!r.diversity) r.warnings.push_back("taxonomy omitted: no diversity results");
  if (eval && r.diversity) {
    r.taxonomy = taxonomy_classify(r.dataset, *eval, r.diversity->structure_mean_symbol);
  }
}

namespace detail {

// Report numbers carry 12 significant digits.
inline Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}
inline Json opt_num(const std::optional<double>& x) { return x ? num(*x) : Json(nullptr); }

inline Json summary_json(const SummaryStats& s) {
  Json j;
  j["count"] = s.count;
  j["mean"] = num(s.mean);
  j["sd"] = s.sd_defined ? num(s.sd) : Json(nullptr);
  j["p2.5"] = num(s.p025);
  j["p97.5"] = num(s.p975);
  return j;
}

}  // namespace detail

inline Json to_json(const DatasetStats& s) {
  auto ms = [](const MeanSd& m) {
    Json j;
    j["mean"] = detail::num(m.mean);
    j["sd"] = m.sd_defined ? detail::num(m.sd) : Json(nullptr);
    return j;
  };
  Json j;
  j["num_graphs"] = s.num_graphs;
  j["nodes"] = ms(s.n);
  j["edges_directed"] = ms(s.m);
  j["mean_degree"] = ms(s.degree);
  j["density"] = ms(s.density);
  j["sd_convention"] = DatasetStats::sd_convention;
  return j;
}

inline Json to_json(const DatasetComplementarity& c) {
  Json j;
  j["num_records"] = c.records.size();
  Json rows = Json::array();
  for (const auto& s : c.summary) {
    Json row;
    row["kind"] = std::string(mode_name(s.kind));
    row["t"] = detail::num(s.t);
    row.update(detail::summary_json(s.stats));
    rows.push_back(std::move(row));
  }
  j["summary"] = std::move(rows);
  j["warnings"] = c.warnings;
  return j;
}

inline Json to_json(const DiversitySummary& d) {
  auto part = [](double mu, double sd, Symbol ms, Symbol ss) {
    Json j;
    j["mean"] = detail::num(mu);
    j["sd"] = detail::num(sd);
    j["mean_symbol"] = std::string(to_string(ms));
    j["sd_symbol"] = std::string(to_string(ss));
    return j;
  };
  Json j;
  j["structure"] = part(d.structure_mean, d.structure_sd, d.structure_mean_symbol, d.structure_sd_symbol);
  j["features"] = part(d.features_mean, d.features_sd, d.features_mean_symbol, d.features_sd_symbol);
  return j;
}

inline Json to_json(const SeparabilityResult& r) {
  Json j;
  j["metric"] = r.metric;
  j["condensed"] = r.condensed;
  Json groups = Json::array();
  for (const auto& g : r.groups) {
    Json names = Json::array();
    for (Mode m : g) names.push_back(std::string(mode_name(m)));
    groups.push_back(std::move(names));
  }
  j["groups"] = std::move(groups);
  if (!r.models.empty()) {
    Json modes = Json::array();
    for (std::size_t i = 0; i < r.modes.size(); ++i) {
      Json m;
      m["kind"] = std::string(mode_name(r.modes[i]));
      m["model"] = r.models[i].str();
      m["n"] = r.sample_sizes[i];
      m["mean"] = detail::num(r.means[i]);
      if (!r.intervals.empty()) {
        m["ci"] = Json::array({detail::num(r.intervals[i].lo), detail::num(r.intervals[i].hi)});
      }
      modes.push_back(std::move(m));
    }
    j["modes"] = std::move(modes);
    j["num_tests"] = r.num_tests;
    j["adjusted_alpha"] = detail::num(r.adjusted_alpha);
    Json pairs = Json::array();
    for (std::size_t a = 0; a < r.modes.size(); ++a) {
      for (std::size_t b = a + 1; b < r.modes.size(); ++b) {
        Json p;
        p["a"] = std::string(mode_name(r.modes[a]));
        p["b"] = std::string(mode_name(r.modes[b]));
        p["p_value"] = detail::opt_num(r.p_values[a][b]);
        p["separable"] = static_cast<bool>(r.separable[a][b]);
        pairs.push_back(std::move(p));
      }
    }
    j["pairs"] = std::move(pairs);
  }
  j["warnings"] = r.warnings;
  return j;
}

inline Json to_json(const DatasetSeparability& s, std::optional<Symbol> published) {
  Json j;
  Json metrics = Json::array();
  for (const auto& r : s.per_metric) metrics.push_back(to_json(r));
  j["metrics"] = std::move(metrics);
  j["structure"] = std::string(to_string(s.informativeness.structure));
  j["features"] = std::string(to_string(s.informativeness.features));
  j["score"] = detail::num(s.score);
  j["evaluation"] = std::string(to_string(s.evaluation));
  if (published) j["published_evaluation"] = std::string(to_string(*published));
  j["warnings"] = s.informativeness.warnings;
  return j;
}

inline Json to_json(const CorrelationResult& c) {
  auto with_symbol = [](const std::optional<double>& v) {
    Json j;
    j["value"] = detail::opt_num(v);
    j["symbol"] = v ? Json(std::string(to_string(correlation_symbol(*v)))) : Json(nullptr);
    return j;
  };
  Json j;
  j["metric"] = c.metric;
  j["num_points"] = c.points.size();
  j["pearson"] = with_symbol(c.pearson);
  j["spearman"] = with_symbol(c.spearman);
  j["kendall_tau_b"] = with_symbol(c.kendall);
  return j;
}

inline Json to_json(const TaxonomyVerdict& v) {
  Json j;
  j["action"] = std::string(to_string(v.action));
  j["separability_high"] = v.separability_high;
  j["structural_diversity_high"] = v.diversity_high;
  return j;
}

template <class T>
Json section(const std::optional<T>& x) {
  return x ? to_json(*x) : Json(nullptr);
}

/// Top-level keys: dataset, stats, complementarity, diversity, separability,
/// correlations, taxonomy. Missing sections are null.
inline Json report_json(const DatasetReport& r) {
  Json j;
  j["dataset"] = r.dataset;
  j["stats"] = section(r.stats);
  j["complementarity"] = section(r.complementarity);
  j["diversity"] = section(r.diversity);
  j["separability"] = r.separability ? to_json(*r.separability, r.evaluation_override)
                                     : Json(nullptr);
  j["correlations"] = section(r.correlations);
  j["taxonomy"] = section(r.taxonomy);
  return j;
}

// ---------------------------------------------------------------------------
// Files

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  return os;
}

/// Writes <dataset>.report.json plus CSV sidecars into `dir`. Returns the
/// paths written, in order.
inline std::vector<std::filesystem::path> emit_report(const DatasetReport& r,
                                                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto out = [&](const std::string& suffix) {
    written.push_back(dir / (r.dataset + suffix));
    return open_output(written.back());
  };
  {
    auto os = out(".report.json");
    os << report_json(r).dump(2) << '\n';
  }
  if (r.stats) {
    auto os = out(".stats.csv");
    os << "dataset,num_graphs,n_mean,n_sd,m_mean,m_sd,degree_mean,degree_sd,density_mean,density_sd\n";
    const auto& s = *r.stats;
    os << r.dataset << ',' << s.num_graphs << ',' << format_double(s.n.mean) << ','
       << format_double(s.n.sd) << ',' << format_double(s.m.mean) << ',' << format_double(s.m.sd)
       << ',' << format_double(s.degree.mean) << ',' << format_double(s.degree.sd) << ','
       << format_double(s.density.mean) << ',' << format_double(s.density.sd) << '\n';
  }
  if (r.complementarity) {
    auto os = out(".complementarity_plot.csv");
    os << "kind,t,mean,p2.5,p97.5\n";
    for (const auto& s : r.complementarity->summary) {
      os << mode_name(s.kind) << ',' << format_double(s.t) << ',' << format_double(s.stats.mean)
         << ',' << format_double(s.stats.p025) << ',' << format_double(s.stats.p975) << '\n';
    }
  }
  if (r.diversity) {
    auto os = out(".diversity.csv");
    const auto& d = *r.diversity;
    os << "dataset,structure_mean,structure_sd,features_mean,features_sd,"
          "structure_mean_symbol,structure_sd_symbol,features_mean_symbol,features_sd_symbol\n";
    os << r.dataset << ',' << format_double(d.structure_mean) << ','
       << format_double(d.structure_sd) << ',' << format_double(d.features_mean) << ','
       << format_double(d.features_sd) << ',' << to_string(d.structure_mean_symbol) << ','
       << to_string(d.structure_sd_symbol) << ',' << to_string(d.features_mean_symbol) << ','
       << to_string(d.features_sd_symbol) << '\n';
  }
  if (r.separability) {
    auto os = out(".separability.csv");
    os << "metric,condensed,structure,features,evaluation\n";
    for (const auto& m : r.separability->per_metric) {
      os << m.metric << ',' << m.condensed << ','
         << to_string(r.separability->informativeness.structure) << ','
         << to_string(r.separability->informativeness.features) << ','
         << to_string(r.separability->evaluation) << '\n';
    }
  }
  if (r.correlations) {
    auto os = out(".correlation_points.csv");
    os << "kind,t,complementarity,performance\n";
    for (const auto& p : r.correlations->points) {
      os << mode_name(p.kind) << ',' << format_double(p.t) << ',' << format_double(p.complementarity)
         << ',' << format_double(p.performance) << '\n';
    }
  }
  if (r.taxonomy) {
    auto os = out(".taxonomy.csv");
    os << "dataset,action,separability_high,structural_diversity_high\n";
    os << r.dataset << ',' << to_string(r.taxonomy->action) << ','
       << (r.taxonomy->separability_high ? 1 : 0) << ',' << (r.taxonomy->diversity_high ? 1 : 0)
       << '\n';
  }
  return written;
}

}  // namespace rings
