#pragma once

// Performance separability over externally produced model-performance
// records: best-model selection, two-sample permutation tests, Bonferroni
// correction, the partial order of perturbations, and the informativeness /
// evaluation scoring built on it.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rings/core.hpp"
#include "rings/perturb.hpp"
#include "rings/sampling.hpp"
#include "rings/util.hpp"

namespace rings {

// ---------------------------------------------------------------------------
// Records

struct PerformanceRecord {
  std::string dataset;
  Mode kind = Mode::o;
  std::string arch;
  std::string hparams;
  std::string run;
  std::string metric;
  double value = 0.0;

  friend bool operator==(const PerformanceRecord&, const PerformanceRecord&) = default;
};

struct GraphOutcomeRecord {
  std::string dataset;
  Mode kind = Mode::o;
  std::string arch;
  std::string run;
  GraphId graph_id = 0;
  bool correct = false;

  friend bool operator==(const GraphOutcomeRecord&, const GraphOutcomeRecord&) = default;
};

inline constexpr std::string_view kPerformanceHeader = "dataset,kind,arch,hparams,run,metric,value";
inline constexpr std::string_view kOutcomeHeader = "dataset,kind,arch,run,graph_id,correct";

namespace detail {

inline std::vector<std::vector<std::string>> read_csv_rows(std::istream& in, std::string_view header,
                                                           const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw InputError(source + ": empty file");
  ++lineno;
  if (trim(line) != header) {
    throw InputError(source + ":1: expected header '" + std::string(header) + "'");
  }
  const std::size_t width = split_fields(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw InputError(source + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(width) + " fields, got " + std::to_string(fields.size()));
    }
    std::vector<std::string> row(fields.begin(), fields.end());
    row.push_back(std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mode parse_kind_at(const std::string& s, const std::string& where) {
  if (auto m = try_parse_mode(s)) return *m;
  throw InputError(where + ": unknown perturbation kind '" + s + "'");
}

}  // namespace detail

inline std::vector<PerformanceRecord> parse_performance_csv(std::istream& in,
                                                            const std::string& source = "<input>") {
  std::vector<PerformanceRecord> out;
  for (auto& row : detail::read_csv_rows(in, kPerformanceHeader, source)) {
    const std::string where = source + ":" + row[7];
    PerformanceRecord r;
    r.dataset = row[0];
    r.kind = detail::parse_kind_at(row[1], where);
    r.arch = row[2];
    r.hparams = row[3];
    r.run = row[4];
    r.metric = row[5];
    const auto v = parse_double(row[6]);
    if (!v || !std::isfinite(*v)) throw InputError(where + ": value must be a finite number");
    r.value = *v;
    if (r.dataset.empty() || r.metric.empty()) {
      throw InputError(where + ": dataset and metric must be nonempty");
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<PerformanceRecord> load_performance_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open performance records '" + path.string() + "'");
  return parse_performance_csv(in, path.string());
}

inline void write_performance_csv(const std::vector<PerformanceRecord>& records, std::ostream& os) {
  os << kPerformanceHeader << '\n';
  for (const auto& r : records) {
    os << r.dataset << ',' << mode_name(r.kind) << ',' << r.arch << ',' << r.hparams << ','
       << r.run << ',' << r.metric << ',' << format_double(r.value) << '\n';
  }
}

inline std::vector<GraphOutcomeRecord> parse_outcome_csv(std::istream& in,
                                                         const std::string& source = "<input>") {
  std::vector<GraphOutcomeRecord> out;
  for (auto& row : detail::read_csv_rows(in, kOutcomeHeader, source)) {
    const std::string where = source + ":" + row[6];
    GraphOutcomeRecord r;
    r.dataset = row[0];
    r.kind = detail::parse_kind_at(row[1], where);
    r.arch = row[2];
    r.run = row[3];
    const auto id = parse_int(row[4]);
    if (!id) throw InputError(where + ": graph_id must be an integer");
    r.graph_id = *id;
    if (row[5] == "1" || row[5] == "true") {
      r.correct = true;
    } else if (row[5] == "0" || row[5] == "false") {
      r.correct = false;
    } else {
      throw InputError(where + ": correct must be 0/1 or true/false");
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<GraphOutcomeRecord> load_graph_outcomes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph outcomes '" + path.string() + "'");
  return parse_outcome_csv(in, path.string());
}

inline void write_outcome_csv(const std::vector<GraphOutcomeRecord>& records, std::ostream& os) {
  os << kOutcomeHeader << '\n';
  for (const auto& r : records) {
    os << r.dataset << ',' << mode_name(r.kind) << ',' << r.arch << ',' << r.run << ','
       << r.graph_id << ',' << (r.correct ? 1 : 0) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Best-model selection

/// Metrics where smaller values are better.
inline bool lower_is_better(std::string_view metric) {
  return metric == "mae" || metric == "loss" || metric == "mse" || metric == "rmse";
}

struct ModelId {
  std::string arch;
  std::string hparams;

  std::string str() const { return hparams.empty() ? arch : arch + ":" + hparams; }
  friend auto operator<=>(const ModelId&, const ModelId&) = default;
  friend bool operator==(const ModelId&, const ModelId&) = default;
};

/// Best (arch, hparams) for one dataset and kind by mean target metric.
/// Ties: higher mean accuracy, then lower mean loss, then smallest id.
inline ModelId select_best_model(const std::vector<PerformanceRecord>& records,
                                 const std::string& dataset, Mode kind, const std::string& metric) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    std::optional<double> mean() const {
      return n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
  };
  std::map<ModelId, std::map<std::string, Acc, std::less<>>> models;
  for (const auto& r : records) {
    if (r.dataset != dataset || r.kind != kind) continue;
    auto& a = models[{r.arch, r.hparams}][r.metric];
    a.sum += r.value;
    a.n += 1;
  }
  std::optional<ModelId> best;
  std::optional<double> best_target, best_acc, best_loss;
  const double sign = lower_is_better(metric) ? -1.0 : 1.0;
  auto lookup = [](const auto& m, const char* name) -> std::optional<double> {
    auto it = m.find(name);
    return it == m.end() ? std::nullopt : it->second.mean();
  };
  for (const auto& [id, metrics] : models) {
    auto it = metrics.find(metric);
    if (it == metrics.end()) continue;
    const double target = sign * *it->second.mean();
    const auto acc = lookup(metrics, "accuracy");
    const auto loss = lookup(metrics, "loss");
    bool better = !best;
    if (best) {
      if (target != *best_target) {
        better = target > *best_target;
      } else if (acc && best_acc && *acc != *best_acc) {
        better = *acc > *best_acc;
      } else if (loss && best_loss && *loss != *best_loss) {
        better = *loss < *best_loss;
      }
      // Remaining ties keep the earlier (lexically smaller) id.
    }
    if (better) {
      best = id;
      best_target = target;
      best_acc = acc;
      best_loss = loss;
    }
  }
  if (!best) {
    throw InputError("no '" + metric + "' records for dataset " + dataset + ", kind " +
                     std::string(mode_name(kind)));
  }
  return *best;
}

/// Target-metric values of one model, in record order.
inline std::vector<double> model_sample(const std::vector<PerformanceRecord>& records,
                                        const std::string& dataset, Mode kind, const ModelId& model,
                                        const std::string& metric) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.dataset == dataset && r.kind == kind && r.metric == metric && r.arch == model.arch &&
        r.hparams == model.hparams) {
      out.push_back(r.value);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-sample statistics

enum class TestStatistic { ks, wilcoxon, bootstrap };

inline std::string_view to_string(TestStatistic s) {
  switch (s) {
    case TestStatistic::ks: return "ks";
    case TestStatistic::wilcoxon: return "wilcoxon";
    case TestStatistic::bootstrap: return "bootstrap";
  }
  return "ks";
}
inline TestStatistic statistic_from_string(std::string_view s) {
  if (s == "ks") return TestStatistic::ks;
  if (s == "wilcoxon") return TestStatistic::wilcoxon;
  if (s == "bootstrap") return TestStatistic::bootstrap;
  throw InputError("unknown test statistic '" + std::string(s) + "' (expected ks, wilcoxon, bootstrap)");
}

namespace detail {

// Pooled sample sorted ascending, with the index one past each tie run and
// doubled midranks (integers).
struct Pooled {
  std::vector<double> values;
  std::vector<std::size_t> tie_ends;
  std::vector<std::int64_t> rank2;
};

inline Pooled pool(const std::vector<double>& a, const std::vector<double>& b) {
  Pooled p;
  p.values = a;
  p.values.insert(p.values.end(), b.begin(), b.end());
  std::sort(p.values.begin(), p.values.end());
  const std::size_t n = p.values.size();
  p.rank2.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && p.values[j] == p.values[i]) ++j;
    // positions i..j-1 share rank (i+1 + j)/2; doubled: i+1+j.
    for (std::size_t k = i; k < j; ++k) p.rank2[k] = static_cast<std::int64_t>(i + 1 + j);
    p.tie_ends.push_back(j);
    i = j;
  }
  return p;
}

// max |c_a n_b - c_b n_a| over tie-run ends; KS = that / (n_a n_b).
inline std::int64_t ks_scaled(const Pooled& p, const std::vector<char>& in_a, std::int64_t na,
                              std::int64_t nb) {
  std::int64_t ca = 0, cb = 0, best = 0;
  std::size_t k = 0;
  for (std::size_t end : p.tie_ends) {
    for (; k < end; ++k) (in_a[k] ? ca : cb) += 1;
    best = std::max(best, std::abs(ca * nb - cb * na));
  }
  return best;
}

inline std::int64_t rank_sum2(const Pooled& p, const std::vector<char>& in_a) {
  std::int64_t s = 0;
  for (std::size_t k = 0; k < in_a.size(); ++k) {
    if (in_a[k]) s += p.rank2[k];
  }
  return s;
}

// Membership of the original split over sorted positions. Equal values are
// interchangeable, so a's members take the first slots of each tie run.
inline std::vector<char> original_labels(const Pooled& p, const std::vector<double>& a) {
  std::vector<double> sa = a;
  std::sort(sa.begin(), sa.end());
  std::vector<char> in_a(p.values.size(), 0);
  std::size_t k = 0, start = 0;
  for (std::size_t end : p.tie_ends) {
    std::size_t slot = start;
    while (k < sa.size() && sa[k] == p.values[start]) {
      in_a[slot++] = 1;
      ++k;
    }
    start = end;
  }
  return in_a;
}

inline void require_nonempty(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw InputError("two-sample statistic needs nonempty samples");
}

}  // namespace detail

/// Two-sample Kolmogorov-Smirnov statistic with right-continuous ECDFs.
inline double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  detail::require_nonempty(a, b);
  const auto p = detail::pool(a, b);
  const auto na = static_cast<std::int64_t>(a.size()), nb = static_cast<std::int64_t>(b.size());
  return static_cast<double>(detail::ks_scaled(p, detail::original_labels(p, a), na, nb)) /
         static_cast<double>(na * nb);
}

/// Rank sum of `a` in the pooled sample, midranks for ties.
inline double wilcoxon_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  detail::require_nonempty(a, b);
  const auto p = detail::pool(a, b);
  return 0.5 * static_cast<double>(detail::rank_sum2(p, detail::original_labels(p, a)));
}

enum class PermutationMode { automatic, exhaustive, monte_carlo };

struct PermutationOptions {
  TestStatistic statistic = TestStatistic::ks;
  std::size_t n_perm = 10000;
  std::uint64_t seed = 0;
  PermutationMode mode = PermutationMode::automatic;
  unsigned threads = 1;
};

struct PermutationResult {
  double p_value = 1.0;
  double observed = 0.0;  // KS D, or |W - E[W]| for Wilcoxon
  bool exhaustive = false;
  bool degenerate = false;  // all pooled values identical
};

inline constexpr std::size_t kExhaustiveLimit = 20000;
inline constexpr std::size_t kPermutationBlock = 1024;

/// C(n, k), saturating at `cap` + 1.
inline std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(c)));
}

/// Permutation p-value. Extremity is D >= D_obs for KS and
/// |W - n_a(N+1)/2| >= observed for Wilcoxon; both are compared in exact
/// integer arithmetic. Exhaustive p = count / C(N, n_a); Monte Carlo
/// p = (1 + count) / (1 + n_perm) over fixed-size blocks of permutations,
/// each block seeded from (seed, block index).
inline PermutationResult permutation_test(const std::vector<double>& a, const std::vector<double>& b,
                                          const PermutationOptions& opt) {
  detail::require_nonempty(a, b);
  if (opt.statistic == TestStatistic::bootstrap) {
    throw InputError("permutation_test supports ks and wilcoxon statistics");
  }
  if (opt.n_perm < 1) throw InputError("n_perm must be >= 1");
  const auto p = detail::pool(a, b);
  const std::size_t big_n = p.values.size();
  const auto na = static_cast<std::int64_t>(a.size()), nb = static_cast<std::int64_t>(b.size());
  const std::int64_t center2 = na * static_cast<std::int64_t>(big_n + 1);

  auto stat = [&](const std::vector<char>& in_a) -> std::int64_t {
    if (opt.statistic == TestStatistic::ks) return detail::ks_scaled(p, in_a, na, nb);
    return std::abs(detail::rank_sum2(p, in_a) - center2);
  };
  const std::int64_t observed = stat(detail::original_labels(p, a));

  PermutationResult result;
  result.observed = opt.statistic == TestStatistic::ks
                        ? static_cast<double>(observed) / static_cast<double>(na * nb)
                        : 0.5 * static_cast<double>(observed);
  if (p.tie_ends.size() == 1) {
    result.degenerate = true;
    result.p_value = 1.0;
    return result;
  }

  const std::size_t combos = binomial_capped(big_n, a.size(), kExhaustiveLimit);
  const bool exhaustive =
      opt.mode == PermutationMode::exhaustive ||
      (opt.mode == PermutationMode::automatic && combos <= kExhaustiveLimit);
  if (exhaustive) {
    if (combos > kExhaustiveLimit && opt.mode == PermutationMode::exhaustive) {
      throw InputError("exhaustive permutation test limited to " +
                       std::to_string(kExhaustiveLimit) + " assignments");
    }
    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<char> in_a(big_n, 0);
    std::size_t count = 0, total = 0;
    const std::size_t k = idx.size();
    for (;;) {
      std::fill(in_a.begin(), in_a.end(), 0);
      for (std::size_t i : idx) in_a[i] = 1;
      if (stat(in_a) >= observed) ++count;
      ++total;
      // Next k-combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == big_n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    result.exhaustive = true;
    result.p_value = static_cast<double>(count) / static_cast<double>(total);
    return result;
  }

  const std::size_t blocks = (opt.n_perm + kPermutationBlock - 1) / kPermutationBlock;
  std::vector<std::size_t> counts(blocks, 0);
  parallel_for(blocks, opt.threads, [&](std::size_t blk) {
    Rng rng(combine_seed(opt.seed, blk));
    const std::size_t len = std::min(kPermutationBlock, opt.n_perm - blk * kPermutationBlock);
    std::vector<char> in_a(big_n, 0);
    std::fill(in_a.begin(), in_a.begin() + na, 1);
    std::size_t c = 0;
    for (std::size_t r = 0; r < len; ++r) {
      std::shuffle(in_a.begin(), in_a.end(), rng);
      if (stat(in_a) >= observed) ++c;
    }
    counts[blk] = c;
  });
  const std::size_t count = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  result.p_value = static_cast<double>(1 + count) / static_cast<double>(1 + opt.n_perm);
  return result;
}

inline double bonferroni_adjust(double alpha, std::size_t m) {
  if (m == 0) throw InputError("Bonferroni correction needs m >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0,1)");
  return alpha / static_cast<double>(m);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Percentile bootstrap interval of the mean.
inline Interval bootstrap_ci(const std::vector<double>& sample, std::size_t n_boot, double level,
                             std::uint64_t seed) {
  if (sample.empty()) throw InputError("bootstrap of empty sample");
  if (n_boot < 1) throw InputError("n_boot must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0,1)");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
  std::vector<double> means(n_boot);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) s += sample[pick(rng)];
    m = s / static_cast<double>(sample.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile_sorted(means, tail), quantile_sorted(means, 1.0 - tail)};
}

// ---------------------------------------------------------------------------
// Partial order and condensed notation

using ModeGroups = std::vector<std::vector<Mode>>;

/// Members alphabetical within a group, groups best first: "cf/cg > o > rf".
inline std::string render_condensed(const ModeGroups& groups) {
  std::string out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<std::string_view> names;
    for (Mode m : groups[g]) names.push_back(mode_name(m));
    std::sort(names.begin(), names.end());
    if (g) out += " > ";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out += '/';
      out += names[i];
    }
  }
  return out;
}

inline ModeGroups parse_condensed(std::string_view s) {
  ModeGroups groups;
  std::set<Mode> seen;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find('>', start);
    const auto part = trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (part.empty()) throw InputError("empty group in condensed order '" + std::string(s) + "'");
    std::vector<Mode> group;
    for (auto name : split_fields(part, '/')) {
      const Mode m = parse_mode(name);
      if (!seen.insert(m).second) {
        throw InputError("mode '" + std::string(name) + "' repeated in condensed order");
      }
      group.push_back(m);
    }
    groups.push_back(std::move(group));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return groups;
}

struct PartialOrder {
  ModeGroups groups;  // best first
  std::vector<std::string> warnings;
};

/// Groups are the connected components of the not-separable relation,
/// ordered by descending mean of member scores (higher = better). Ties in
/// group score keep the order of first appearance in `modes`.
inline PartialOrder partial_order(const std::vector<Mode>& modes, const std::vector<double>& scores,
                                  const std::vector<std::vector<bool>>& separable) {
  const std::size_t k = modes.size();
  if (scores.size() != k || separable.size() != k) throw InputError("partial_order: size mismatch");
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < k; ++i) {
    if (separable[i].size() != k) throw InputError("partial_order: decision matrix not square");
    for (std::size_t j = i + 1; j < k; ++j) {
      if (separable[i][j] != separable[j][i]) {
        throw InputError("partial_order: decision matrix not symmetric");
      }
      if (!separable[i][j]) parent[find(i)] = find(j);
    }
  }
  PartialOrder out;
  std::vector<std::size_t> roots;
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t r = find(i);
    if (members.find(r) == members.end()) roots.push_back(r);
    members[r].push_back(i);
  }
  for (std::size_t r : roots) {
    const auto& m = members[r];
    for (std::size_t x = 0; x < m.size(); ++x) {
      for (std::size_t y = x + 1; y < m.size(); ++y) {
        if (separable[m[x]][m[y]]) {
          out.warnings.push_back("non-transitive separability: " +
                                 std::string(mode_name(modes[m[x]])) + " and " +
                                 std::string(mode_name(modes[m[y]])) +
                                 " are separable but share a group");
        }
      }
    }
  }
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t g = 0; g < roots.size(); ++g) {
    double s = 0.0;
    for (std::size_t i : members[roots[g]]) s += scores[i];
    order.emplace_back(s / static_cast<double>(members[roots[g]].size()), g);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (const auto& [score, g] : order) {
    std::vector<Mode> group;
    for (std::size_t i : members[roots[g]]) group.push_back(modes[i]);
    out.groups.push_back(std::move(group));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Informativeness and evaluation score

enum class Informativeness { uninformative = 0, mixed = 1, informative = 2 };

inline std::string_view to_string(Informativeness i) {
  switch (i) {
    case Informativeness::uninformative: return "uninformative";
    case Informativeness::mixed: return "(un)informative";
    case Informativeness::informative: return "informative";
  }
  return "uninformative";
}

/// Five-level ladder shared by evaluation scores and diversity bins.
enum class Symbol { very_low, low, medium, high, very_high };

inline std::string_view to_string(Symbol s) {
  switch (s) {
    case Symbol::very_low: return "--";
    case Symbol::low: return "-";
    case Symbol::medium: return "∘";
    case Symbol::high: return "+";
    case Symbol::very_high: return "++";
  }
  return "--";
}

/// Accepts the ring operator or a plain "o" for the middle symbol.
inline Symbol symbol_from_string(std::string_view s) {
  s = trim(s);
  if (s == "--") return Symbol::very_low;
  if (s == "-") return Symbol::low;
  if (s == "∘" || s == "o") return Symbol::medium;
  if (s == "+") return Symbol::high;
  if (s == "++") return Symbol::very_high;
  throw InputError("unknown symbol '" + std::string(s) + "'");
}

struct ModeInformativeness {
  Informativeness structure = Informativeness::uninformative;
  Informativeness features = Informativeness::uninformative;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::optional<std::size_t> group_of(const ModeGroups& groups, Mode m) {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (std::find(groups[g].begin(), groups[g].end(), m) != groups[g].end()) return g;
  }
  return std::nullopt;
}

inline bool precedes_all(const ModeGroups& groups, std::initializer_list<Mode> rivals,
                         const char* label, std::vector<std::string>& warnings) {
  const auto o = group_of(groups, Mode::o);
  if (!o) throw InputError("partial order does not contain the original mode 'o'");
  bool any = false, all = true;
  std::string missing;
  for (Mode m : rivals) {
    const auto g = group_of(groups, m);
    if (!g) {
      missing += missing.empty() ? "" : ",";
      missing += mode_name(m);
      continue;
    }
    any = true;
    all = all && *o < *g;
  }
  if (!missing.empty()) {
    warnings.push_back(std::string(label) + " verdict uses the modes present; missing: " + missing);
  }
  if (!any) {
    warnings.push_back(std::string("no ") + label + " perturbations present; treated as uninformative");
    return false;
  }
  return all;
}

inline Informativeness combine(const std::vector<bool>& verdicts) {
  const bool all = std::all_of(verdicts.begin(), verdicts.end(), [](bool v) { return v; });
  const bool none = std::none_of(verdicts.begin(), verdicts.end(), [](bool v) { return v; });
  if (all) return Informativeness::informative;
  if (none) return Informativeness::uninformative;
  return Informativeness::mixed;
}

}  // namespace detail

/// Structure is informative under one metric iff o's group strictly precedes
/// those of eg, cg, rg; features iff it precedes cf and rf. Verdicts that
/// disagree across metrics are mixed.
inline ModeInformativeness mode_informativeness(const std::vector<ModeGroups>& orders) {
  if (orders.empty()) throw InputError("informativeness needs at least one ordering");
  ModeInformativeness out;
  std::vector<bool> s, f;
  for (const auto& groups : orders) {
    s.push_back(detail::precedes_all(groups, {Mode::eg, Mode::cg, Mode::rg}, "structure", out.warnings));
    f.push_back(detail::precedes_all(groups, {Mode::cf, Mode::rf}, "feature", out.warnings));
  }
  out.structure = detail::combine(s);
  out.features = detail::combine(f);
  std::sort(out.warnings.begin(), out.warnings.end());
  out.warnings.erase(std::unique(out.warnings.begin(), out.warnings.end()), out.warnings.end());
  return out;
}

inline ModeInformativeness mode_informativeness(const ModeGroups& order_accuracy,
                                                const ModeGroups& order_auroc) {
  return mode_informativeness(std::vector<ModeGroups>{order_accuracy, order_auroc});
}

/// 1.5 S + F on the 0..2 informativeness scale; 0..5 overall.
inline double evaluation_score(Informativeness structure, Informativeness features) {
  return 1.5 * static_cast<double>(structure) + static_cast<double>(features);
}

inline Symbol evaluation_symbol(double score) {
  if (score <= 1.0) return Symbol::very_low;
  if (score <= 2.0) return Symbol::low;
  if (score <= 3.0) return Symbol::medium;
  if (score <= 4.0) return Symbol::high;
  return Symbol::very_high;
}

inline Symbol evaluation_symbol(Informativeness structure, Informativeness features) {
  return evaluation_symbol(evaluation_score(structure, features));
}

// ---------------------------------------------------------------------------
// Pipeline

struct SeparabilityConfig {
  TestStatistic statistic = TestStatistic::ks;
  std::size_t n_perm = 10000;
  double alpha = 0.01;
  bool bonferroni = true;
  std::uint64_t seed = 0;
  PermutationMode mode = PermutationMode::automatic;
  std::size_t n_boot = 10000;
  double level = 0.99;
  unsigned threads = 1;
  std::vector<std::string> metrics;  // empty: every metric present except loss
};

struct SeparabilityResult {
  std::string dataset;
  std::string metric;
  std::vector<Mode> modes;  // canonical order
  std::vector<ModelId> models;
  std::vector<std::size_t> sample_sizes;
  std::vector<double> means;
  std::vector<std::vector<std::optional<double>>> p_values;  // unset under bootstrap
  std::vector<Interval> intervals;                            // bootstrap only
  double adjusted_alpha = 0.0;
  std::size_t num_tests = 0;
  std::vector<std::vector<bool>> separable;
  ModeGroups groups;
  std::string condensed;
  std::vector<std::string> warnings;
};

/// Tests every unordered pair of modes that have records for `metric`.
inline SeparabilityResult pairwise_separability(const std::vector<PerformanceRecord>& records,
                                                const std::string& dataset,
                                                const std::string& metric,
                                                const SeparabilityConfig& cfg) {
  SeparabilityResult r;
  r.dataset = dataset;
  r.metric = metric;
  std::set<Mode> present;
  for (const auto& rec : records) {
    if (rec.dataset == dataset && rec.metric == metric) present.insert(rec.kind);
  }
  for (Mode m : kAllModes) {
    if (present.count(m)) r.modes.push_back(m);
  }
  const std::size_t k = r.modes.size();
  if (k < 2) {
    throw InputError("dataset " + dataset + ", metric " + metric +
                     ": separability needs records for >= 2 perturbation kinds");
  }
  std::vector<std::vector<double>> samples;
  for (Mode m : r.modes) {
    r.models.push_back(select_best_model(records, dataset, m, metric));
    samples.push_back(model_sample(records, dataset, m, r.models.back(), metric));
    r.sample_sizes.push_back(samples.back().size());
    r.means.push_back(mean_sd(samples.back()).mean);
  }
  r.num_tests = k * (k - 1) / 2;
  r.adjusted_alpha = cfg.bonferroni ? bonferroni_adjust(cfg.alpha, r.num_tests) : cfg.alpha;
  r.p_values.assign(k, std::vector<std::optional<double>>(k));
  r.separable.assign(k, std::vector<bool>(k, false));

  if (cfg.statistic == TestStatistic::bootstrap) {
    // Bonferroni widens each interval to level 1 - adjusted alpha.
    const double level = cfg.bonferroni ? 1.0 - bonferroni_adjust(1.0 - cfg.level, r.num_tests)
                                        : cfg.level;
    for (std::size_t i = 0; i < k; ++i) {
      r.intervals.push_back(bootstrap_ci(samples[i], cfg.n_boot, level, combine_seed(cfg.seed, i)));
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        r.separable[i][j] = r.separable[j][i] = !r.intervals[i].overlaps(r.intervals[j]);
      }
    }
  } else {
    std::size_t pair = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j, ++pair) {
        PermutationOptions opt;
        opt.statistic = cfg.statistic;
        opt.n_perm = cfg.n_perm;
        opt.seed = combine_seed(cfg.seed, pair);
        opt.mode = cfg.mode;
        opt.threads = cfg.threads;
        const auto res = permutation_test(samples[i], samples[j], opt);
        if (res.degenerate) {
          r.warnings.push_back(std::string(mode_name(r.modes[i])) + " vs " +
                               std::string(mode_name(r.modes[j])) +
                               ": all pooled values identical, p = 1");
        }
        r.p_values[i][j] = r.p_values[j][i] = res.p_value;
        r.separable[i][j] = r.separable[j][i] = res.p_value < r.adjusted_alpha;
      }
    }
  }

  std::vector<double> scores = r.means;
  if (lower_is_better(metric)) {
    for (double& s : scores) s = -s;
  }
  auto order = partial_order(r.modes, scores, r.separable);
  r.groups = std::move(order.groups);
  r.condensed = render_condensed(r.groups);
  r.warnings.insert(r.warnings.end(), order.warnings.begin(), order.warnings.end());
  return r;
}

struct DatasetSeparability {
  std::string dataset;
  std::vector<SeparabilityResult> per_metric;
  ModeInformativeness informativeness;
  double score = 0.0;
  Symbol evaluation = Symbol::very_low;
};

inline std::vector<std::string> metrics_for(const std::vector<PerformanceRecord>& records,
                                            const std::string& dataset,
                                            const SeparabilityConfig& cfg) {
  if (!cfg.metrics.empty()) return cfg.metrics;
  std::set<std::string> names;
  for (const auto& r : records) {
    if (r.dataset == dataset && r.metric != "loss") names.insert(r.metric);
  }
  return {names.begin(), names.end()};
}

inline DatasetSeparability evaluate_dataset(const std::vector<PerformanceRecord>& records,
                                            const std::string& dataset,
                                            const SeparabilityConfig& cfg) {
  DatasetSeparability out;
  out.dataset = dataset;
  const auto metrics = metrics_for(records, dataset, cfg);
  if (metrics.empty()) throw InputError("no performance records for dataset " + dataset);
  std::vector<ModeGroups> orders;
  for (const auto& m : metrics) {
    out.per_metric.push_back(pairwise_separability(records, dataset, m, cfg));
    orders.push_back(out.per_metric.back().groups);
  }
  out.informativeness = mode_informativeness(orders);
  out.score = evaluation_score(out.informativeness.structure, out.informativeness.features);
  out.evaluation = evaluation_symbol(out.score);
  return out;
}

inline std::vector<std::string> datasets_in(const std::vector<PerformanceRecord>& records) {
  std::set<std::string> names;
  for (const auto& r : records) names.insert(r.dataset);
  return {names.begin(), names.end()};
}

// ---------------------------------------------------------------------------
// Graph-level agreement

struct SetSimilarity {
  double jaccard = 1.0;
  double asymmetric = 1.0;      // |A n B| / |B|
  bool asymmetric_defined = true;
};

inline SetSimilarity graph_set_similarity(const std::set<GraphId>& a, const std::set<GraphId>& b) {
  std::size_t inter = 0;
  for (GraphId x : b) inter += a.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  SetSimilarity s;
  s.jaccard = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
  if (b.empty()) {
    s.asymmetric = 1.0;
    s.asymmetric_defined = false;
  } else {
    s.asymmetric = static_cast<double>(inter) / static_cast<double>(b.size());
  }
  return s;
}

/// Correctly classified graph ids per run for one (dataset, kind).
inline std::map<std::string, std::set<GraphId>> correct_sets(
    const std::vector<GraphOutcomeRecord>& outcomes, const std::string& dataset, Mode kind) {
  std::map<std::string, std::set<GraphId>> out;
  for (const auto& r : outcomes) {
    if (r.dataset != dataset || r.kind != kind) continue;
    auto& s = out[r.arch + "\x1f" + r.run];
    if (r.correct) s.insert(r.graph_id);
  }
  return out;
}

struct GraphAgreement {
  Mode reference = Mode::o;
  Mode kind = Mode::o;
  std::size_t runs = 0;
  double jaccard = 0.0;
  double asymmetric = 0.0;  // fraction of kind's correct graphs also correct on reference
};

/// Mean similarity over (arch, run) pairs present under both kinds.
inline std::optional<GraphAgreement> graph_agreement(const std::vector<GraphOutcomeRecord>& outcomes,
                                                     const std::string& dataset, Mode reference,
                                                     Mode kind) {
  const auto a = correct_sets(outcomes, dataset, reference);
  const auto b = correct_sets(outcomes, dataset, kind);
  GraphAgreement g{reference, kind, 0, 0.0, 0.0};
  for (const auto& [run, set_a] : a) {
    auto it = b.find(run);
    if (it == b.end()) continue;
    const auto s = graph_set_similarity(set_a, it->second);
    g.jaccard += s.jaccard;
    g.asymmetric += s.asymmetric;
    ++g.runs;
  }
  if (g.runs == 0) return std::nullopt;
  g.jaccard /= static_cast<double>(g.runs);
  g.asymmetric /= static_cast<double>(g.runs);
  return g;
}

}  // namespace rings
