#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rings/perturb.hpp"

using namespace rings;

namespace {

AttributedGraph sample_graph(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return oracle::random_connected(9, 0.3, 4, rng, 5);
}

std::vector<double> sorted_rows_key(const Matrix& x) {
  std::vector<double> key;
  for (Eigen::Index i = 0; i < x.rows(); ++i) key.push_back(x.row(i).sum());
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

TEST(Mode, NamesRoundTrip) {
  for (Mode m : kAllModes) EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_THROW(parse_mode("xx"), InputError);
  int structural = 0, feature = 0;
  for (Mode m : kAllModes) {
    structural += is_structural(m);
    feature += is_feature(m);
    EXPECT_FALSE(is_structural(m) && is_feature(m));
  }
  EXPECT_EQ(structural, 4);
  EXPECT_EQ(feature, 4);
}

TEST(Perturb, EachKindTouchesOneMode) {
  const auto g = sample_graph(1);
  for (Mode m : kAllModes) {
    const auto h = perturb_graph(g, PerturbationKind::of(m), 42);
    EXPECT_EQ(h.id(), g.id());
    EXPECT_EQ(h.num_nodes(), g.num_nodes());
    if (is_feature(m)) {
      EXPECT_EQ(h.edges(), g.edges()) << mode_name(m);
    }
    if (is_structural(m)) {
      EXPECT_EQ(h.features(), g.features()) << mode_name(m);
    }
    if (m == Mode::o) {
      EXPECT_EQ(h, g);
    }
  }
}

TEST(Perturb, DeterministicKinds) {
  const auto g = sample_graph(2);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  EXPECT_EQ(perturb_graph(g, PerturbationKind::of(Mode::ef), 0).features(), Matrix::Zero(n, 1));
  EXPECT_EQ(perturb_graph(g, PerturbationKind::of(Mode::cf), 0).features(), Matrix::Identity(n, n));
  EXPECT_EQ(perturb_graph(g, PerturbationKind::of(Mode::eg), 0).num_edges(), 0u);
  const auto c = perturb_graph(g, PerturbationKind::of(Mode::cg), 0);
  EXPECT_TRUE(is_complete(c));
  EXPECT_EQ(c.num_edges(), g.num_nodes() * (g.num_nodes() - 1) / 2);
}

TEST(Perturb, ShufflesPreserveMultisets) {
  const auto g = sample_graph(3);
  const auto sf = perturb_graph(g, PerturbationKind::of(Mode::sf), 7);
  EXPECT_EQ(sorted_rows_key(sf.features()), sorted_rows_key(g.features()));
  const auto sg = perturb_graph(g, PerturbationKind::of(Mode::sg), 7);
  EXPECT_EQ(sg.num_edges(), g.num_edges());
  std::vector<std::size_t> d0(g.num_nodes()), d1(g.num_nodes());
  for (const auto& e : g.edges()) ++d0[e.u], ++d0[e.v];
  for (const auto& e : sg.edges()) ++d1[e.u], ++d1[e.v];
  std::sort(d0.begin(), d0.end());
  std::sort(d1.begin(), d1.end());
  EXPECT_EQ(d0, d1);
}

TEST(Perturb, RandomKindsFollowSeed) {
  const auto g = sample_graph(4);
  const auto rf = PerturbationKind::random_features(6);
  EXPECT_EQ(perturb_graph(g, rf, 11), perturb_graph(g, rf, 11));
  EXPECT_NE(perturb_graph(g, rf, 11), perturb_graph(g, rf, 12));
  EXPECT_EQ(perturb_graph(g, rf, 11).feature_dim(), 6u);
  EXPECT_EQ(perturb_graph(g, PerturbationKind::random_graph(1.0), 3).num_edges(),
            g.num_nodes() * (g.num_nodes() - 1) / 2);
  EXPECT_EQ(perturb_graph(g, PerturbationKind::random_graph(0.0), 3).num_edges(), 0u);
  EXPECT_THROW(PerturbationKind::random_graph(1.5), InputError);
  EXPECT_THROW(PerturbationKind::random_features(0), InputError);
}

TEST(Perturb, DatasetIndependentOfThreads) {
  std::vector<AttributedGraph> gs;
  for (GraphId i = 0; i < 40; ++i) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(i));
    gs.push_back(oracle::random_connected(6 + static_cast<std::size_t>(i % 5), 0.2, 2, rng, i));
  }
  const GraphDataset d("threads", gs);
  for (Mode m : {Mode::rf, Mode::sf, Mode::rg, Mode::sg}) {
    const auto a = perturb_dataset(d, PerturbationKind::of(m), 5, 1);
    const auto b = perturb_dataset(d, PerturbationKind::of(m), 5, 8);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(a.graphs()[i], b.graphs()[i]);
  }
}

TEST(Perturb, RelabelMovesEdgesNotFeatures) {
  Matrix x(3, 1);
  x << 1, 2, 3;
  AttributedGraph g(0, 3, {Edge(0, 1)}, x);
  const auto h = relabel_structure(g, {2, 0, 1});
  EXPECT_EQ(h.edges(), (std::vector<Edge>{Edge(0, 2)}));
  EXPECT_EQ(h.features(), x);
  const auto f = permute_feature_rows(g, {2, 0, 1});
  EXPECT_EQ(f.features()(0, 0), 3.0);
  EXPECT_THROW(relabel_structure(g, {0, 1}), InputError);
}
