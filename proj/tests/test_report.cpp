#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rings/report.hpp"

using namespace rings;
namespace fs = std::filesystem;

namespace {

// Published values are rounded to two decimals; skip those within rounding of a bin edge.
bool near_edge(double x, std::initializer_list<double> edges) {
  for (double e : edges) {
    if (std::abs(x - e) <= 0.005 + 1e-12) return true;
  }
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Bins, MeanAndSdExamples) {
  EXPECT_EQ(mean_bin(0.4), Symbol::medium);
  EXPECT_EQ(mean_bin(0.30), Symbol::low);
  EXPECT_EQ(mean_bin(0.0), Symbol::very_low);
  EXPECT_EQ(mean_bin(1.0), Symbol::very_high);
  EXPECT_EQ(mean_bin(0.62), Symbol::high);
  EXPECT_THROW(mean_bin(1.01), InputError);
  EXPECT_THROW(mean_bin(std::nan("")), InputError);
  EXPECT_EQ(sd_bin(0.049), Symbol::very_low);
  EXPECT_EQ(sd_bin(0.05), Symbol::low);
  EXPECT_EQ(sd_bin(0.12), Symbol::medium);
  EXPECT_EQ(sd_bin(0.19), Symbol::high);
  EXPECT_EQ(sd_bin(0.34), Symbol::very_high);
  EXPECT_THROW(sd_bin(-0.1), InputError);
}

TEST(Bins, MonotoneInValue) {
  for (int i = 0; i < 100; ++i) {
    EXPECT_LE(mean_bin(i / 100.0), mean_bin((i + 1) / 100.0));
    EXPECT_LE(sd_bin(i / 300.0), sd_bin((i + 1) / 300.0));
  }
}

// Cells whose published symbol follows the stated brackets. The table prints
// the top symbol in place of the second-highest one (means in [0.6, 0.8), sds
// in [0.15, 0.2)); those cells are not checked.
TEST(Bins, PublishedDiversitySymbolsAwayFromEdges) {
  std::size_t checked = 0;
  for (auto r : fixture::read_tsv("diversity_table.tsv")) {
    for (const auto& [mu_key, sd_key] : {std::pair{"ds_mu", "ds_sd"}, std::pair{"df_mu", "df_sd"}}) {
      const double mu = std::stod(r[mu_key]), sd = std::stod(r[sd_key]);
      if (!near_edge(mu, {0.2, 0.4, 0.6, 0.8}) && !(mu >= 0.6 && mu < 0.8)) {
        EXPECT_EQ(mean_bin(mu), symbol_from_string(r["sym_" + std::string(mu_key)]))
            << r["dataset"] << ' ' << mu_key;
        ++checked;
      }
      if (!near_edge(sd, {0.05, 0.1, 0.15, 0.2}) && !(sd >= 0.15 && sd < 0.2)) {
        EXPECT_EQ(sd_bin(sd), symbol_from_string(r["sym_" + std::string(sd_key)]))
            << r["dataset"] << ' ' << sd_key;
        ++checked;
      }
    }
  }
  EXPECT_GE(checked, 20u);
}

TEST(Taxonomy, Examples) {
  EXPECT_EQ(taxonomy_classify("NCI1", Symbol::very_high, mean_bin(0.56)).action, TaxonomyAction::keep);
  EXPECT_EQ(taxonomy_classify("DD", Symbol::very_low, mean_bin(0.62)).action, TaxonomyAction::realign);
  EXPECT_EQ(taxonomy_classify("COLLAB", Symbol::very_high, mean_bin(0.30)).action,
            TaxonomyAction::deprecate_structural);
  EXPECT_EQ(taxonomy_classify("Proteins", Symbol::low, mean_bin(0.36)).action,
            TaxonomyAction::deprecate_full);
  EXPECT_EQ(to_string(TaxonomyAction::deprecate_structural), "Deprecate-structural");
}

TEST(Taxonomy, PublishedTableFromKsOrders) {
  std::map<std::string, std::string> want;
  for (auto r : fixture::read_tsv("taxonomy_table.tsv")) want[r["dataset"]] = r["action"];
  std::map<std::string, double> ds_mu;
  for (auto r : fixture::read_tsv("diversity_table.tsv")) ds_mu[r["dataset"]] = std::stod(r["ds_mu"]);
  const auto rows = fixture::separability_rows("ks");
  ASSERT_EQ(rows.size(), 13u);
  for (auto r : rows) {
    const auto sep = separability_from_orders(r["dataset"], {{"accuracy", r["accuracy"]}, {"auroc", r["auroc"]}});
    EXPECT_EQ(sep.evaluation, symbol_from_string(r["evaluation"])) << r["dataset"];
    const auto v = taxonomy_classify(r["dataset"], sep.evaluation, mean_bin(ds_mu.at(r["dataset"])));
    EXPECT_EQ(to_string(v.action), want.at(r["dataset"])) << r["dataset"];
  }
}

TEST(Correlation, LinearExamples) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y, z;
  for (double v : x) y.push_back(2 * v + 1), z.push_back(-v);
  EXPECT_NEAR(*pearson(x, y), 1.0, 1e-15);
  EXPECT_NEAR(*spearman(x, y), 1.0, 1e-15);
  EXPECT_NEAR(*kendall(x, y), 1.0, 1e-15);
  EXPECT_NEAR(*pearson(x, z), -1.0, 1e-15);
  EXPECT_NEAR(*kendall(x, z), -1.0, 1e-15);
  EXPECT_FALSE(pearson(x, {3, 3, 3, 3, 3}));
  EXPECT_THROW(pearson({1}, {2}), InputError);
  EXPECT_EQ(correlation_symbol(1.0), Symbol::very_high);
  EXPECT_EQ(correlation_symbol(0.0), Symbol::medium);
  EXPECT_EQ(correlation_symbol(-0.7), Symbol::very_low);
}

TEST(Correlation, MidranksAndOracles) {
  EXPECT_EQ(midranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<double> x(12), y(12);
    for (auto& v : x) v = coarse(rng);
    for (auto& v : y) v = coarse(rng);
    const auto k = kendall(x, y);
    ASSERT_TRUE(k);
    EXPECT_NEAR(*k, oracle::kendall_tau_b(x, y), 1e-12);
    const auto s = spearman(x, y), p = pearson(midranks(x), midranks(y));
    ASSERT_TRUE(s && p);
    EXPECT_NEAR(*s, *p, 1e-12);
  }
}

TEST(Correlation, ComplementarityVsPerformance) {
  DatasetComplementarity dc;
  const std::vector<std::pair<Mode, double>> values{{Mode::o, 0.5}, {Mode::eg, 0.9}, {Mode::cf, 0.2}};
  std::vector<PerformanceRecord> recs;
  for (const auto& [m, v] : values) {
    dc.summary.push_back({m, 1.0, {1, v, 0.0, false, v, v}});
    for (int i = 0; i < 3; ++i) recs.push_back({"D", m, "A", "h", std::to_string(i), "auroc", 1.0 - v});
  }
  std::vector<std::string> warnings;
  const auto c = complementarity_vs_performance(dc, recs, "D", "auroc", {Mode::o, Mode::eg, Mode::cf}, warnings);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->points.size(), 3u);
  EXPECT_NEAR(*c->pearson, -1.0, 1e-12);
  EXPECT_NEAR(*c->kendall, -1.0, 1e-12);
  EXPECT_TRUE(warnings.empty());
  EXPECT_FALSE(complementarity_vs_performance(dc, recs, "D", "auroc", {Mode::o}, warnings));
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Report, JsonKeysInFixedOrder) {
  DatasetReport r;
  r.dataset = "X";
  r.diversity = make_diversity_summary("X", 0.5, 0.1, 0.7, 0.02);
  r.separability = separability_from_orders("X", {{"auroc", "o > eg > cg > rg > ef > cf > rf"}});
  classify(r);
  ASSERT_TRUE(r.taxonomy);
  EXPECT_EQ(r.taxonomy->action, TaxonomyAction::keep);
  const auto j = report_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"dataset", "stats", "complementarity", "diversity",
                                            "separability", "correlations", "taxonomy"}));
  EXPECT_TRUE(j["stats"].is_null());
  EXPECT_EQ(j["taxonomy"]["action"], "Keep");
  EXPECT_EQ(j["diversity"]["structure"]["mean"].dump(), "0.5");
}

TEST(Report, ClassifyWarnsOnMissingInputs) {
  DatasetReport r;
  r.dataset = "Y";
  classify(r);
  EXPECT_FALSE(r.taxonomy);
  EXPECT_EQ(r.warnings.size(), 2u);
}

TEST(Report, EmitIsDeterministic) {
  DatasetReport r;
  r.dataset = "Z";
  r.diversity = make_diversity_summary("Z", 0.25, 0.3, 0.9, 0.01);
  r.separability = separability_from_orders("Z", {{"accuracy", "cg/o > eg"}});
  classify(r);
  const fs::path a = fs::temp_directory_path() / "rings_emit_a", b = fs::temp_directory_path() / "rings_emit_b";
  fs::remove_all(a), fs::remove_all(b);
  const auto wa = emit_report(r, a), wb = emit_report(r, b);
  ASSERT_EQ(wa.size(), wb.size());
  ASSERT_EQ(wa.size(), 4u);
  for (std::size_t i = 0; i < wa.size(); ++i) {
    EXPECT_EQ(wa[i].filename(), wb[i].filename());
    EXPECT_EQ(slurp(wa[i]), slurp(wb[i]));
  }
  EXPECT_EQ(slurp(a / "Z.taxonomy.csv"),
            "dataset,action,separability_high,structural_diversity_high\nZ,Deprecate-full,0,0\n");
}
