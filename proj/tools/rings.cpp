// rings: command-line front end for dataset perturbation, complementarity,
// separability and reporting. Exit codes: 0 success, 1 violated invariant,
// 2 input error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rings/pipeline.hpp"

namespace {

using namespace rings;

// Flag values; unset options leave the config untouched.
struct Overrides {
  std::string config;
  std::vector<std::string> data;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::vector<std::string> kinds;
  bool degree_onehot = false;

  std::vector<double> t_values;
  std::optional<std::string> structural_metric, convention, feature_metric;
  std::optional<double> p, q, rg_p, diversity_t;
  std::optional<std::size_t> rf_dim;
  std::vector<std::uint64_t> seeds;
  bool pool_seeds = false;
  bool check_duality = false;

  std::optional<std::string> performance, outcomes, statistic, correction;
  std::optional<double> alpha, level;
  std::optional<std::size_t> n_perm, n_boot;
  std::vector<std::string> metrics;
  std::optional<std::string> correlation_metric;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--data", o.data, "Dataset path: TU directory or .jsonl file (repeatable)");
  app->add_option("--seed", o.seed, "Master seed (default 0)");
  app->add_option("--threads", o.threads, "Worker threads (default: RINGS_THREADS or all cores)");
  app->add_option("--out", o.out, "Output directory");
  app->add_flag("--degree-onehot", o.degree_onehot,
                "Featureless TU datasets get one-hot degree features");
}

void add_kinds(CLI::App* app, Overrides& o) {
  app->add_option("--kinds", o.kinds, "Perturbation kinds (o ef cf rf sf eg cg rg sg)")
      ->delimiter(',');
  app->add_option("--rf-dim", o.rf_dim, "Random-feature dimension (default 10)");
  app->add_option("--rg-p", o.rg_p, "Random-graph edge probability (default: input density)");
}

void add_complement(CLI::App* app, Overrides& o) {
  app->add_option("--t", o.t_values, "Diffusion / heat times")->delimiter(',');
  app->add_option("--structural-metric", o.structural_metric,
                  "diffusion | heat-kernel | resistance | shortest-path");
  app->add_option("--convention", o.convention, "laplacian-literal | diffusion-operator");
  app->add_option("--feature-metric", o.feature_metric, "euclidean | cosine");
  app->add_option("--p", o.p, "Inner norm order");
  app->add_option("--q", o.q, "Outer norm order");
  app->add_option("--seeds", o.seeds, "Seeds for random kinds (default 0,2,4,8,16)")->delimiter(',');
  app->add_flag("--pool-seeds", o.pool_seeds, "Summaries pool all seeds instead of per-graph means");
  app->add_option("--diversity-t", o.diversity_t, "Time used for structural diversity (default 1)");
}

void add_separability(CLI::App* app, Overrides& o) {
  app->add_option("--performance", o.performance, "Performance CSV");
  app->add_option("--outcomes", o.outcomes, "Graph-outcome CSV");
  app->add_option("--statistic", o.statistic, "ks | wilcoxon | bootstrap");
  app->add_option("--alpha", o.alpha, "Significance level (default 0.01)");
  app->add_option("--correction", o.correction, "bonferroni | none");
  app->add_option("--n-perm", o.n_perm, "Random permutations (default 10000)");
  app->add_option("--n-boot", o.n_boot, "Bootstrap resamples (default 10000)");
  app->add_option("--level", o.level, "Bootstrap confidence level (default 0.99)");
  app->add_option("--metrics", o.metrics, "Metrics to test (default: all but loss)")->delimiter(',');
  app->add_option("--correlation-metric", o.correlation_metric, "Metric for correlations");
}

RunConfig build_config(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.data.empty()) {
    c.datasets.clear();
    for (const auto& d : o.data) c.datasets.push_back(dataset_source(d));
  }
  if (o.degree_onehot) {
    for (auto& d : c.datasets) d.degree_onehot = true;
  }
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (c.threads == 0) c.threads = default_thread_count();
  if (o.out) c.out = *o.out;
  if (!o.kinds.empty()) c.kinds = parse_modes(o.kinds);

  auto& cc = c.complementarity;
  if (!o.t_values.empty()) cc.t_values = o.t_values;
  if (o.structural_metric) cc.structural.kind = structural_kind_from_string(*o.structural_metric);
  if (o.convention) cc.structural.convention = convention_from_string(*o.convention);
  if (o.feature_metric) cc.feature = feature_metric_from_string(*o.feature_metric);
  if (o.p) cc.p = *o.p;
  if (o.q) cc.q = *o.q;
  if (o.rf_dim) cc.random_feature_dim = *o.rf_dim;
  if (o.rg_p) cc.random_graph_p = *o.rg_p;
  if (!o.seeds.empty()) cc.random_seeds = o.seeds;
  if (o.pool_seeds) cc.pool_seeds = true;
  if (o.diversity_t) c.diversity_t = *o.diversity_t;
  c.check_duality = c.check_duality || o.check_duality;

  auto& sc = c.separability;
  if (o.performance) c.performance = *o.performance;
  if (o.outcomes) c.outcomes = *o.outcomes;
  if (o.statistic) sc.statistic = statistic_from_string(*o.statistic);
  if (o.alpha) sc.alpha = *o.alpha;
  if (o.correction) {
    if (*o.correction != "bonferroni" && *o.correction != "none") {
      throw InputError("--correction must be bonferroni or none");
    }
    sc.bonferroni = *o.correction == "bonferroni";
  }
  if (o.n_perm) sc.n_perm = *o.n_perm;
  if (o.n_boot) sc.n_boot = *o.n_boot;
  if (o.level) sc.level = *o.level;
  if (!o.metrics.empty()) sc.metrics = o.metrics;
  if (o.correlation_metric) c.correlation_metric = *o.correlation_metric;
  cc.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate attributed-graph datasets via mode perturbations"};
  app.require_subcommand(1);
  Overrides o;
  GenOptions gen;

  auto* stats = app.add_subcommand("stats", "Dataset statistics (nodes, edges, degree, density)");
  add_common(stats, o);

  auto* perturb = app.add_subcommand("perturb", "Write perturbed datasets as JSONL");
  add_common(perturb, o);
  add_kinds(perturb, o);

  auto* complement = app.add_subcommand("complement", "Mode complementarity records and summaries");
  add_common(complement, o);
  add_kinds(complement, o);
  add_complement(complement, o);
  complement->add_flag("--check-duality", o.check_duality,
                       "Exit 1 if any complete/empty pair violates duality by more than 1e-9");

  auto* diversity = app.add_subcommand("diversity", "Structural and feature mode diversity");
  add_common(diversity, o);
  add_complement(diversity, o);

  auto* separability = app.add_subcommand("separability", "Performance separability from records");
  add_common(separability, o);
  add_separability(separability, o);

  auto* report = app.add_subcommand("report", "Per-dataset JSON reports with taxonomy");
  add_common(report, o);
  add_kinds(report, o);
  add_complement(report, o);
  add_separability(report, o);

  auto* gensub = app.add_subcommand("gen", "Generate synthetic JSONL fixtures");
  add_common(gensub, o);
  gensub->add_option("--type", gen.type, "ring-of-cliques | er");
  gensub->add_option("--count", gen.count, "Number of graphs");
  gensub->add_option("--cliques", gen.num_cliques, "Cliques per ring");
  gensub->add_option("--clique-size", gen.clique_size, "Nodes per clique");
  gensub->add_option("--nodes", gen.nodes, "Nodes per ER graph");
  gensub->add_option("--edge-p", gen.p, "ER edge probability");
  gensub->add_option("--dim", gen.feature_dim, "Feature dimension");
  gensub->add_option("--name", gen.name, "Dataset name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig c = build_config(o);
    if (stats->parsed()) return cmd_stats(c, std::cerr);
    if (perturb->parsed()) return cmd_perturb(c, std::cerr);
    if (complement->parsed()) return cmd_complement(c, std::cerr);
    if (diversity->parsed()) return cmd_diversity(c, std::cerr);
    if (separability->parsed()) return cmd_separability(c, std::cerr);
    if (report->parsed()) return cmd_report(c, std::cerr);
    if (gensub->parsed()) return cmd_gen(c, gen, std::cerr);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
