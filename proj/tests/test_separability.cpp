#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rings/separability.hpp"

using namespace rings;

namespace {

Informativeness parse_informativeness(const std::string& s) {
  if (s == "informative") return Informativeness::informative;
  if (s == "(un)informative") return Informativeness::mixed;
  if (s == "uninformative") return Informativeness::uninformative;
  throw std::runtime_error("bad informativeness " + s);
}

std::vector<double> normal_sample(std::mt19937_64& rng, std::size_t n, double mu, double sd) {
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> out(n);
  for (auto& x : out) x = d(rng);
  return out;
}

std::vector<PerformanceRecord> two_mode_records(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<PerformanceRecord> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back({"D", Mode::o, "GIN", "h", std::to_string(i), "auroc", a[i]});
  for (std::size_t i = 0; i < b.size(); ++i) out.push_back({"D", Mode::eg, "GIN", "h", std::to_string(i), "auroc", b[i]});
  return out;
}

}  // namespace

TEST(Csv, PerformanceRoundTripAndErrors) {
  std::istringstream in(
      "dataset,kind,arch,hparams,run,metric,value\n"
      "D,o,GIN,h1,0,accuracy,0.5\nD,eg,GIN,h1,0,accuracy,0.6\nD,cg,GCN,h2,1,auroc,0.7\n"
      "D,cf,GCN,h2,1,loss,1.5\nD,rf,GAT,h3,2,accuracy,0.25\nD,rg,GAT,h3,2,auroc,0.125\n");
  const auto recs = parse_performance_csv(in, "mem");
  ASSERT_EQ(recs.size(), 6u);
  std::ostringstream out;
  write_performance_csv(recs, out);
  std::istringstream back(out.str());
  const auto again = parse_performance_csv(back, "mem");
  ASSERT_EQ(again.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(again[i].kind, recs[i].kind);
    EXPECT_EQ(again[i].value, recs[i].value);
  }
  std::istringstream bad("dataset,kind,arch,hparams,run,metric,value\nD,xx,GIN,h,0,auroc,0.5\n");
  try {
    parse_performance_csv(bad, "bad.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:2"), std::string::npos) << e.what();
  }
  std::istringstream header("dataset,kind\n");
  EXPECT_THROW(parse_performance_csv(header, "h"), InputError);
}

TEST(Csv, OutcomesRoundTrip) {
  std::istringstream in("dataset,kind,arch,run,graph_id,correct\nD,o,GIN,0,3,1\nD,o,GIN,0,4,0\n");
  const auto recs = parse_outcome_csv(in, "mem");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_TRUE(recs[0].correct);
  std::ostringstream out;
  write_outcome_csv(recs, out);
  EXPECT_EQ(out.str(), "dataset,kind,arch,run,graph_id,correct\nD,o,GIN,0,3,1\nD,o,GIN,0,4,0\n");
}

TEST(BestModel, TieRules) {
  std::vector<PerformanceRecord> r{{"D", Mode::o, "A", "h", "0", "auroc", 0.8},
                                   {"D", Mode::o, "B", "h", "0", "auroc", 0.9}};
  EXPECT_EQ(select_best_model(r, "D", Mode::o, "auroc").arch, "B");

  r = {{"D", Mode::o, "A", "h", "0", "auroc", 0.8}, {"D", Mode::o, "A", "h", "0", "accuracy", 0.7},
       {"D", Mode::o, "B", "h", "0", "auroc", 0.8}, {"D", Mode::o, "B", "h", "0", "accuracy", 0.6}};
  EXPECT_EQ(select_best_model(r, "D", Mode::o, "auroc").arch, "A");

  r = {{"D", Mode::o, "B", "h", "0", "auroc", 0.8}, {"D", Mode::o, "B", "h", "0", "loss", 0.3},
       {"D", Mode::o, "C", "h", "0", "auroc", 0.8}, {"D", Mode::o, "C", "h", "0", "loss", 0.2}};
  EXPECT_EQ(select_best_model(r, "D", Mode::o, "auroc").arch, "C");

  r = {{"D", Mode::o, "Z", "h", "0", "auroc", 0.8}, {"D", Mode::o, "M", "h", "0", "auroc", 0.8}};
  EXPECT_EQ(select_best_model(r, "D", Mode::o, "auroc").arch, "M");

  r = {{"D", Mode::o, "A", "h", "0", "mae", 0.3}, {"D", Mode::o, "B", "h", "0", "mae", 0.2}};
  EXPECT_EQ(select_best_model(r, "D", Mode::o, "mae").arch, "B");
  EXPECT_THROW(select_best_model(r, "D", Mode::eg, "mae"), InputError);
}

TEST(Statistics, KsExamples) {
  EXPECT_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(ks_statistic({1, 2, 3}, {4, 5, 6}), 1.0);
  EXPECT_EQ(ks_statistic({1, 2}, {1, 3}), 0.5);
  EXPECT_THROW(ks_statistic({}, {1}), InputError);
}

TEST(Statistics, WilcoxonExamples) {
  EXPECT_EQ(wilcoxon_statistic({1, 2}, {3, 4}), 3.0);
  EXPECT_EQ(wilcoxon_statistic({5}, {5}), 1.5);
}

TEST(Statistics, MatchBruteForceOracles) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coarse(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(1 + trial % 9), b(1 + (trial / 9) % 11);
    for (auto& x : a) x = coarse(rng) * 0.1;
    for (auto& x : b) x = coarse(rng) * 0.1;
    EXPECT_NEAR(ks_statistic(a, b), oracle::ks(a, b), 1e-12);
    EXPECT_NEAR(ks_statistic(a, b), ks_statistic(b, a), 1e-15);
    EXPECT_DOUBLE_EQ(wilcoxon_statistic(a, b), oracle::wilcoxon(a, b));
  }
}

TEST(Permutation, ExhaustiveExample) {
  PermutationOptions opt;
  opt.mode = PermutationMode::exhaustive;
  const auto r = permutation_test({1, 2, 3}, {10, 11, 12}, opt);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_DOUBLE_EQ(r.p_value, 0.1);
  EXPECT_EQ(r.observed, 1.0);
}

TEST(Permutation, ExhaustiveEqualsEnumerationOracle) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coarse(0, 5);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> a(1 + trial % 6), b(1 + (trial / 6) % 6);
    for (auto& x : a) x = coarse(rng);
    for (auto& x : b) x = coarse(rng);
    for (TestStatistic s : {TestStatistic::ks, TestStatistic::wilcoxon}) {
      PermutationOptions opt;
      opt.statistic = s;
      opt.mode = PermutationMode::exhaustive;
      const auto r = permutation_test(a, b, opt);
      if (r.degenerate) {
        EXPECT_EQ(r.p_value, 1.0);
        continue;
      }
      const double na = static_cast<double>(a.size()), n = na + static_cast<double>(b.size());
      const double want =
          s == TestStatistic::ks
              ? oracle::enumerate_p(a, b, oracle::ks)
              : oracle::enumerate_p(a, b, [&](const auto& x, const auto& y) {
                  return std::abs(oracle::wilcoxon(x, y) - na * (n + 1.0) / 2.0);
                });
      EXPECT_DOUBLE_EQ(r.p_value, want) << to_string(s) << " trial " << trial;
    }
  }
}

TEST(Permutation, DegenerateAndDeterministic) {
  const auto same = permutation_test({2, 2, 2}, {2, 2}, {});
  EXPECT_TRUE(same.degenerate);
  EXPECT_EQ(same.p_value, 1.0);

  std::mt19937_64 rng(4);
  const auto a = normal_sample(rng, 30, 0.5, 0.1), b = normal_sample(rng, 30, 0.55, 0.1);
  PermutationOptions opt;
  opt.n_perm = 3000;
  opt.seed = 77;
  const auto r1 = permutation_test(a, b, opt);
  opt.threads = 5;
  const auto r2 = permutation_test(a, b, opt);
  EXPECT_FALSE(r1.exhaustive);
  EXPECT_EQ(r1.p_value, r2.p_value);
  EXPECT_GT(r1.p_value, 0.0);
  EXPECT_LE(r1.p_value, 1.0);
}

TEST(Permutation, InvariantUnderAffineRescaling) {
  std::mt19937_64 rng(6);
  const auto a = normal_sample(rng, 20, 0.5, 0.1), b = normal_sample(rng, 25, 0.6, 0.1);
  auto scale = [](std::vector<double> v) {
    for (auto& x : v) x = 3.0 * x - 7.0;
    return v;
  };
  for (TestStatistic s : {TestStatistic::ks, TestStatistic::wilcoxon}) {
    PermutationOptions opt;
    opt.statistic = s;
    opt.n_perm = 2000;
    EXPECT_EQ(permutation_test(a, b, opt).p_value, permutation_test(scale(a), scale(b), opt).p_value);
  }
}

TEST(Bonferroni, Examples) {
  EXPECT_DOUBLE_EQ(bonferroni_adjust(0.01, 15), 0.01 / 15);
  EXPECT_EQ(bonferroni_adjust(0.01, 1), 0.01);
  EXPECT_NEAR(bonferroni_adjust(0.005, 15), 0.000333333, 1e-9);
  EXPECT_THROW(bonferroni_adjust(0.01, 0), InputError);
}

TEST(Bootstrap, Examples) {
  const auto c = bootstrap_ci({0.3, 0.3, 0.3}, 500, 0.99, 1);
  EXPECT_EQ(c.lo, 0.3);
  EXPECT_EQ(c.hi, 0.3);
  std::mt19937_64 rng(2);
  const auto a = normal_sample(rng, 50, 0.5, 0.01), b = normal_sample(rng, 50, 0.9, 0.01);
  const auto ia = bootstrap_ci(a, 2000, 0.99, 5), ib = bootstrap_ci(b, 2000, 0.99, 5);
  EXPECT_FALSE(ia.overlaps(ib));
  EXPECT_EQ(bootstrap_ci(a, 2000, 0.99, 5).lo, ia.lo);
}

TEST(Pairwise, SyntheticSeparation) {
  std::mt19937_64 rng(12);
  SeparabilityConfig cfg;
  cfg.n_perm = 2000;
  const auto far = pairwise_separability(
      two_mode_records(normal_sample(rng, 100, 0.5, 0.01), normal_sample(rng, 100, 0.9, 0.01)), "D",
      "auroc", cfg);
  EXPECT_EQ(far.num_tests, 1u);
  EXPECT_EQ(far.adjusted_alpha, 0.01);
  EXPECT_TRUE(far.separable[0][1]);
  EXPECT_EQ(far.condensed, "eg > o");

  const auto x = normal_sample(rng, 40, 0.5, 0.05);
  const auto same = pairwise_separability(two_mode_records(x, x), "D", "auroc", cfg);
  EXPECT_FALSE(same.separable[0][1]);
  EXPECT_EQ(same.condensed, "eg/o");

  cfg.statistic = TestStatistic::bootstrap;
  cfg.n_boot = 2000;
  const auto boot = pairwise_separability(
      two_mode_records(normal_sample(rng, 100, 0.5, 0.01), normal_sample(rng, 100, 0.9, 0.01)), "D",
      "auroc", cfg);
  EXPECT_TRUE(boot.separable[0][1]);
  EXPECT_EQ(boot.intervals.size(), 2u);
}

TEST(Pairwise, ThreeModesThreeTests) {
  std::vector<PerformanceRecord> recs;
  for (Mode m : {Mode::o, Mode::cg, Mode::rf}) {
    for (int i = 0; i < 5; ++i) recs.push_back({"D", m, "A", "h", std::to_string(i), "accuracy", 0.1 * i});
  }
  const auto r = pairwise_separability(recs, "D", "accuracy", {});
  EXPECT_EQ(r.num_tests, 3u);
  EXPECT_DOUBLE_EQ(r.adjusted_alpha, 0.01 / 3);
  std::vector<PerformanceRecord> one(recs.begin(), recs.begin() + 5);
  EXPECT_THROW(pairwise_separability(one, "D", "accuracy", {}), InputError);
}

TEST(Pairwise, Nci1FixtureReproducesOrders) {
  const auto recs = load_performance_records(fixture::dir() / "nci1_performance.csv");
  SeparabilityConfig cfg;
  const auto ds = evaluate_dataset(recs, "NCI1", cfg);
  ASSERT_EQ(ds.per_metric.size(), 2u);
  EXPECT_EQ(ds.per_metric[0].metric, "accuracy");
  EXPECT_EQ(ds.per_metric[0].condensed, "o > cg > cf > rg > eg > rf");
  EXPECT_EQ(ds.per_metric[1].condensed, "o > cg > cf > rg > eg/rf");
  EXPECT_EQ(ds.per_metric[1].models[0].arch, "GIN");
  EXPECT_EQ(ds.informativeness.structure, Informativeness::informative);
  EXPECT_EQ(ds.evaluation, Symbol::very_high);
  EXPECT_DOUBLE_EQ(ds.per_metric[0].adjusted_alpha, 0.01 / 15);
}

TEST(PartialOrder, Examples) {
  const std::vector<Mode> m{Mode::o, Mode::eg, Mode::cg};
  std::vector<std::vector<bool>> all(3, std::vector<bool>(3, true));
  const auto strict = partial_order(m, {1, 3, 2}, all);
  EXPECT_EQ(render_condensed(strict.groups), "eg > cg > o");
  EXPECT_TRUE(strict.warnings.empty());

  // a~b, b~c, a separable from c.
  std::vector<std::vector<bool>> chain{{false, false, true}, {false, false, false}, {true, false, false}};
  const auto closed = partial_order(m, {3, 2, 1}, chain);
  ASSERT_EQ(closed.groups.size(), 1u);
  EXPECT_EQ(render_condensed(closed.groups), "cg/eg/o");
  EXPECT_EQ(closed.warnings.size(), 1u);
}

TEST(PartialOrder, GroupsPartitionAndDescend) {
  std::mt19937_64 rng(15);
  std::bernoulli_distribution coin(0.6);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<Mode> modes(kAllModes.begin(), kAllModes.end());
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<bool>> sep(9, std::vector<bool>(9, false));
    std::vector<double> scores(9);
    for (auto& s : scores) s = u(rng);
    for (std::size_t i = 0; i < 9; ++i) {
      for (std::size_t j = i + 1; j < 9; ++j) sep[i][j] = sep[j][i] = coin(rng);
    }
    const auto po = partial_order(modes, scores, sep);
    std::vector<Mode> seen;
    double prev = 2.0;
    for (const auto& g : po.groups) {
      double mean = 0;
      for (Mode x : g) {
        seen.push_back(x);
        mean += scores[static_cast<std::size_t>(std::find(modes.begin(), modes.end(), x) - modes.begin())];
      }
      mean /= static_cast<double>(g.size());
      EXPECT_LE(mean, prev);
      prev = mean;
    }
    std::sort(seen.begin(), seen.end());
    std::vector<Mode> want = modes;
    std::sort(want.begin(), want.end());
    EXPECT_EQ(seen, want);
  }
}

TEST(Condensed, ParseRenderRoundTrip) {
  const auto g = parse_condensed("o > cg/rg > eg > cf/rf");
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(render_condensed(g), "o > cg/rg > eg > cf/rf");
  EXPECT_EQ(render_condensed(parse_condensed("rg/cg >o")), "cg/rg > o");
  EXPECT_THROW(parse_condensed("o > o"), InputError);
  EXPECT_THROW(parse_condensed("o > zz"), InputError);
}

TEST(Scoring, Examples) {
  using I = Informativeness;
  EXPECT_EQ(evaluation_symbol(I::informative, I::informative), Symbol::very_high);
  EXPECT_EQ(evaluation_symbol(I::uninformative, I::informative), Symbol::low);
  EXPECT_EQ(evaluation_symbol(I::mixed, I::mixed), Symbol::medium);
  EXPECT_EQ(evaluation_score(I::mixed, I::informative), 3.5);
  EXPECT_EQ(evaluation_symbol(3.5), Symbol::high);
  EXPECT_EQ(evaluation_symbol(1.0), Symbol::very_low);
  EXPECT_EQ(evaluation_symbol(I::mixed, I::uninformative), Symbol::low);
  EXPECT_EQ(symbol_from_string("o"), Symbol::medium);
  EXPECT_EQ(to_string(Symbol::medium), "∘");
}

TEST(Informativeness, FixtureExamples) {
  const auto collab = mode_informativeness(parse_condensed("o > cg/rg > eg > cf/rf"),
                                           parse_condensed("o > cg/rg > eg > rf > cf"));
  EXPECT_EQ(collab.structure, Informativeness::informative);
  EXPECT_EQ(collab.features, Informativeness::informative);
  const auto enzymes = mode_informativeness(parse_condensed("eg > cg/o > rg > cf > rf"),
                                            parse_condensed("eg > o > cg > rg > cf > rf"));
  EXPECT_EQ(enzymes.structure, Informativeness::uninformative);
  EXPECT_EQ(enzymes.features, Informativeness::informative);
  const auto imdb = mode_informativeness(parse_condensed("cf/cg/eg/o/rf/rg"),
                                         parse_condensed("o > cg > eg/rg > rf > cf"));
  EXPECT_EQ(imdb.structure, Informativeness::mixed);
  EXPECT_EQ(imdb.features, Informativeness::mixed);
}

TEST(Informativeness, MissingModesWarn) {
  const auto r = mode_informativeness(parse_condensed("o > eg > cf"), parse_condensed("o > eg/cf"));
  EXPECT_EQ(r.structure, Informativeness::informative);
  EXPECT_FALSE(r.warnings.empty());
  const auto none = mode_informativeness({parse_condensed("o > cf/rf")});
  EXPECT_EQ(none.structure, Informativeness::uninformative);
  EXPECT_THROW(mode_informativeness({parse_condensed("eg > cf")}), InputError);
}

class PublishedTable : public ::testing::TestWithParam<std::string> {};

TEST_P(PublishedTable, RowsReproduceVerdicts) {
  const auto rows = fixture::separability_rows(GetParam());
  ASSERT_EQ(rows.size(), 13u);
  for (auto r : rows) {
    const auto inf = mode_informativeness(parse_condensed(r["accuracy"]), parse_condensed(r["auroc"]));
    EXPECT_EQ(inf.structure, parse_informativeness(r["structure"])) << r["dataset"];
    EXPECT_EQ(inf.features, parse_informativeness(r["features"])) << r["dataset"];
    EXPECT_EQ(evaluation_symbol(inf.structure, inf.features), symbol_from_string(r["evaluation"]))
        << r["dataset"];
    EXPECT_EQ(render_condensed(parse_condensed(r["auroc"])), r["auroc"]) << r["dataset"];
  }
}

INSTANTIATE_TEST_SUITE_P(AllSetups, PublishedTable,
                         ::testing::Values("ks", "wilcoxon", "ks_alpha_0.005"),
                         [](const auto& info) {
                           std::string s = info.param;
                           std::replace(s.begin(), s.end(), '.', '_');
                           return s;
                         });

TEST(SetSimilarity, Examples) {
  auto s = graph_set_similarity({1, 2}, {1, 2});
  EXPECT_EQ(s.jaccard, 1.0);
  EXPECT_EQ(s.asymmetric, 1.0);
  s = graph_set_similarity({1, 2}, {3});
  EXPECT_EQ(s.jaccard, 0.0);
  EXPECT_EQ(s.asymmetric, 0.0);
  s = graph_set_similarity({1, 2, 3}, {2, 3, 4});
  EXPECT_DOUBLE_EQ(s.jaccard, 0.5);
  EXPECT_DOUBLE_EQ(s.asymmetric, 2.0 / 3.0);
  s = graph_set_similarity({}, {});
  EXPECT_EQ(s.jaccard, 1.0);
  EXPECT_FALSE(s.asymmetric_defined);
}

TEST(SetSimilarity, AgreementAveragesRuns) {
  std::vector<GraphOutcomeRecord> o;
  auto add = [&](Mode m, const char* run, GraphId g, bool c) { o.push_back({"D", m, "GIN", run, g, c}); };
  add(Mode::o, "0", 1, true), add(Mode::o, "0", 2, true), add(Mode::o, "0", 3, false);
  add(Mode::cf, "0", 1, true), add(Mode::cf, "0", 2, false), add(Mode::cf, "0", 3, true);
  add(Mode::o, "1", 1, true), add(Mode::cf, "1", 1, true);
  const auto g = graph_agreement(o, "D", Mode::o, Mode::cf);
  ASSERT_TRUE(g);
  EXPECT_EQ(g->runs, 2u);
  EXPECT_DOUBLE_EQ(g->jaccard, (1.0 / 3.0 + 1.0) / 2.0);
  EXPECT_DOUBLE_EQ(g->asymmetric, (0.5 + 1.0) / 2.0);
}
