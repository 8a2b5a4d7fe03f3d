#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace opinion;

TEST(Families, Clique) {
  auto g = make_clique(3, Rational(1));
  ASSERT_EQ(g.edges().size(), 3u);
  EXPECT_EQ(g.edges()[0].u, 0u);
  EXPECT_EQ(g.edges()[0].v, 1u);
  EXPECT_EQ(g.edges()[2].u, 1u);
  EXPECT_EQ(g.edges()[2].v, 2u);
  for (const auto& e : g.edges()) EXPECT_EQ(g.weight(e), Rational(1));

  auto half = make_clique(2, Rational::parse("0.5"));
  EXPECT_EQ(half.edges().size(), 1u);
  EXPECT_EQ(half.precision(), 1);
  EXPECT_EQ(half.weight(half.edges()[0]), Rational(1, 2));

  EXPECT_EQ(make_clique(4, Rational(1)).edges().size(), 6u);
  EXPECT_THROW(make_clique(1, Rational(1)), ConfigError);
}

TEST(Families, CompleteBipartite) {
  EXPECT_EQ(make_complete_bipartite(2, Rational(1)).edges().size(), 4u);
  EXPECT_EQ(make_complete_bipartite(3, Rational(1)).edges().size(), 9u);
  auto k11 = make_complete_bipartite(1, Rational(1));
  EXPECT_EQ(k11.size(), 2u);
  EXPECT_EQ(k11.edges().size(), 1u);
  auto k33 = make_complete_bipartite(3, Rational(1));
  for (const auto& e : k33.edges()) {
    EXPECT_LT(e.u, 3u);
    EXPECT_GE(e.v, 3u);
  }
  EXPECT_THROW(make_complete_bipartite(0, Rational(1)), ConfigError);
}

TEST(Families, Star) {
  auto s = make_star(5, Rational::parse("0.2"));
  EXPECT_EQ(s.edges().size(), 5u);
  EXPECT_EQ(s.precision(), 1);
  for (const auto& e : s.edges()) EXPECT_EQ(e.u, 0u);
  EXPECT_EQ(make_star(1, Rational(1)).edges().size(), 1u);
  EXPECT_EQ(cutwidth_exact(make_star(3, Rational(1))).value, 2);
}

TEST(Families, GadgetChain) {
  auto one = make_gadget_chain(1, Rational(1), 9);
  EXPECT_EQ(one.graph.size(), 7u);
  EXPECT_EQ(one.graph.edges().size(), 8u);
  EXPECT_EQ(one.graph.max_weight(), 4 * one.graph.scale());
  std::int64_t lo = INT64_MAX;
  for (const auto& e : one.graph.edges()) lo = std::min(lo, e.scaled_weight);
  EXPECT_EQ(one.graph.max_weight() / lo, 4);

  auto two = make_gadget_chain(2, Rational(1), 9);
  EXPECT_EQ(two.graph.size(), 13u);
  EXPECT_EQ(two.epsilon[1], Rational(9));
  EXPECT_EQ(two.graph.to_weight(two.graph.max_weight()), Rational(36));
  lo = INT64_MAX;
  for (const auto& e : two.graph.edges()) lo = std::min(lo, e.scaled_weight);
  EXPECT_EQ(two.graph.to_weight(lo), Rational(1));

  EXPECT_EQ(two.roles[two.player(2, 'D')].gadget, 2u);
  EXPECT_EQ(two.roles[two.player(2, 'D')].role, 'D');
  EXPECT_EQ(two.graph.scaled_weight(two.player(1, 'A'), two.player(2, 'B')), 4 * two.graph.scale());
  EXPECT_THROW(make_gadget_chain(2, Rational(1), 8), ConfigError);
}

TEST(GraphValidation, RejectsMalformedInput) {
  EXPECT_THROW(SocialGraph(3, {{0, 1, Rational(1)}}), ConfigError);  // disconnected
  EXPECT_THROW(SocialGraph(2, {{0, 0, Rational(1)}, {0, 1, Rational(1)}}), ConfigError);
  EXPECT_THROW(SocialGraph(2, {{0, 1, Rational(1)}, {1, 0, Rational(2)}}), ConfigError);
  EXPECT_THROW(SocialGraph(2, {{0, 1, Rational(-1)}}), ConfigError);
  EXPECT_THROW(SocialGraph(2, {{0, 1, Rational(0)}}), ConfigError);
  EXPECT_THROW(SocialGraph(2, {{0, 1, Rational(1, 3)}}), ConfigError);  // no finite decimal
  EXPECT_THROW(SocialGraph(2, {{0, 2, Rational(1)}}), ConfigError);
  EXPECT_NO_THROW(SocialGraph(1, {}));
}

TEST(GraphValidation, PrecisionIsMaxDigits) {
  SocialGraph g(3, {{0, 1, Rational::parse("0.25")}, {1, 2, Rational::parse("1.5")}});
  EXPECT_EQ(g.precision(), 2);
  EXPECT_EQ(g.scale(), 100);
  EXPECT_EQ(g.scaled_weight(0, 1), 25);
  EXPECT_EQ(g.scaled_weight(2, 1), 150);
  EXPECT_EQ(g.scaled_weight(0, 2), 0);
}

TEST(Cuts, Examples) {
  auto k4 = make_clique(4, Rational(1));
  EXPECT_EQ(cut_weight(k4, 0b0011), 4);
  EXPECT_EQ(cut_weight(k4, 0), 0);
  auto k33 = make_complete_bipartite(3, Rational(1));
  EXPECT_EQ(cut_weight(k33, bit(0) | bit(3)), 4);
}

TEST(Cuts, ComplementSymmetry) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    auto g = oracle::random_connected_graph(rng, 7, 1);
    VertexMask all = (VertexMask{1} << 7) - 1;
    for (VertexMask s = 0; s <= all; ++s) EXPECT_EQ(cut_weight(g, s), cut_weight(g, all & ~s));
  }
}

TEST(Cutwidth, Examples) {
  EXPECT_EQ(cutwidth_exact(make_complete_bipartite(3, Rational(1))).value, 5);
  EXPECT_EQ(cutwidth_exact(make_clique(4, Rational(1))).value, 4);
  EXPECT_EQ(cutwidth_exact(make_path(3, Rational(1))).value, 1);
  EXPECT_EQ(cutwidth_exact(SocialGraph(1, {})).value, 0);
}

TEST(Cutwidth, OrderingAchievesValue) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = oracle::random_connected_graph(rng, 3 + rep % 8, rep % 3);
    auto cw = cutwidth_exact(g);
    std::vector<std::size_t> sorted = cw.ordering;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) ASSERT_EQ(sorted[i], i);
    EXPECT_EQ(ordering_width(g, cw.ordering), cw.value);
  }
}

TEST(Cutwidth, MatchesBruteForceCorpus) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t n = 2 + static_cast<std::size_t>(rep % 7);
    auto g = oracle::random_connected_graph(rng, n, rep % 3, 0.15 + 0.1 * (rep % 5));
    EXPECT_EQ(cutwidth_exact(g).value, oracle::cutwidth_brute_force(g)) << "graph " << rep;
  }
}

TEST(Cutwidth, BipartiteAndCliqueFormulas) {
  for (std::size_t m = 1; m <= 4; ++m) {
    auto g = make_complete_bipartite(m, Rational(1));
    auto cw = cutwidth_exact(g);
    EXPECT_EQ(cw.value, static_cast<std::int64_t>((m * m + 1) / 2)) << "m = " << m;
    std::vector<std::size_t> alternating;
    for (std::size_t i = 0; i < m; ++i) {
      alternating.push_back(i);
      alternating.push_back(m + i);
    }
    EXPECT_EQ(ordering_width(g, alternating), cw.value);
  }
  for (std::size_t n = 2; n <= 8; ++n)
    EXPECT_EQ(cutwidth_exact(make_clique(n, Rational(1))).value, static_cast<std::int64_t>(n * n / 4));
}

TEST(Cutwidth, ScalingWeights) {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    auto g = oracle::random_connected_graph(rng, 6, 0);
    std::vector<WeightedEdge> scaled;
    for (const auto& e : g.edges()) scaled.push_back({e.u, e.v, g.weight(e) * Rational(7)});
    SocialGraph h(g.size(), scaled);
    auto a = cutwidth_exact(g);
    auto b = cutwidth_exact(h);
    EXPECT_EQ(b.value, 7 * a.value);
    EXPECT_EQ(ordering_width(h, a.ordering), b.value);
  }
}

TEST(Cutwidth, LimitIsEnforced) {
  EXPECT_THROW(cutwidth_exact(make_path(9, Rational(1)), 8), LimitError);
}
