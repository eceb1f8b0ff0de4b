#include <gtest/gtest.h>

#include "cftg/metric.hpp"
#include "cftg/oracle.hpp"
#include "cftg/random_graphs.hpp"
#include "cftg/verify.hpp"

using namespace cftg;

namespace {

ColoredGraph path_graph(Vertex n, bool colored = false) {
  GraphBuilder b(n);
  for (Vertex v = 0; v + 1 < n; ++v) b.add_edge(v, v + 1, Weight(1), colored ? b.fresh_color() : kNoColor);
  return b.build();
}

ColoredGraph four_cycle() {
  GraphBuilder b(4);
  for (Vertex v = 0; v < 4; ++v) b.add_edge(v, (v + 1) % 4);
  return b.build();
}

TieBrokenMetric::Rational perturbed_sum(const ColoredGraph& g, const TieBrokenMetric& m,
                                        const std::vector<EdgeId>& es) {
  TieBrokenMetric::Rational s = 0;
  for (EdgeId e : es) s += m.perturbed_weight(g, e);
  return s;
}

}  // namespace

TEST(ShortestPath, PathGraphFaultFree) {
  const auto g = path_graph(4, true);
  const TieBrokenMetric m(g, 1);
  const auto p = shortest_path(g, m, 0, 3, FaultSet::colors({}));
  ASSERT_TRUE(p.reachable);
  EXPECT_EQ(p.edges, (std::vector<EdgeId>{0, 1, 2}));
  EXPECT_EQ(p.vertices, (std::vector<Vertex>{0, 1, 2, 3}));
  EXPECT_EQ(g.unscale(p.scaled_weight), Weight(3));
}

TEST(ShortestPath, FaultDisconnects) {
  const auto g = path_graph(4, true);
  const TieBrokenMetric m(g, 1);
  const auto p = shortest_path(g, m, 0, 3, FaultSet::colors({g.edge(1).color}));
  EXPECT_FALSE(p.reachable);
  EXPECT_TRUE(p.edges.empty());
  EXPECT_FALSE(last_edge(g, m, 0, 3, FaultSet::colors({g.edge(1).color})).has_value());
}

TEST(ShortestPath, FourCycleTieIsBrokenStably) {
  const auto g = four_cycle();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TieBrokenMetric m(g, seed);
    const auto p = shortest_path(g, m, 0, 2, FaultSet::edges({}));
    ASSERT_EQ(p.length(), 2u);
    const std::vector<EdgeId> upper{0, 1};
    const std::vector<EdgeId> lower{3, 2};
    const auto& other = p.edges == upper ? lower : upper;
    ASSERT_TRUE(p.edges == upper || p.edges == lower);
    EXPECT_LT(perturbed_sum(g, m, p.edges), perturbed_sum(g, m, other));
    // failing an edge of the other path keeps the choice
    for (EdgeId e : other) EXPECT_EQ(shortest_path(g, m, 0, 2, FaultSet::edges({e})), p);
  }
}

TEST(ShortestPath, BothFourCycleRoutesOccurAcrossSeeds) {
  const auto g = four_cycle();
  std::set<std::vector<EdgeId>> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) seen.insert(shortest_path(g, TieBrokenMetric(g, seed), 0, 2, {}).edges);
  EXPECT_EQ(seen.size(), 2u);
}

TEST(LastEdge, PathAndSelf) {
  const auto g = path_graph(3);
  const TieBrokenMetric m(g, 3);
  EXPECT_EQ(last_edge(g, m, 0, 2, FaultSet::edges({})), std::optional<EdgeId>(1));
  EXPECT_FALSE(last_edge(g, m, 1, 1, FaultSet::edges({})).has_value());
  const auto self = shortest_path(g, m, 1, 1, FaultSet::edges({}));
  EXPECT_TRUE(self.reachable);
  EXPECT_TRUE(self.edges.empty());
}

TEST(LastEdge, ConsistentAlongPathsOnRandomGraphs) {
  random_graphs::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto b = random_graphs::connected(20, 25, trial % 2 == 1, rng);
    random_graphs::color_randomly(b, 2, 0.2, rng);
    const auto g = b.build();
    const TieBrokenMetric m(g, static_cast<std::uint64_t>(trial));
    for (ColorId c = -1; c < std::min<ColorId>(g.color_count(), 4); ++c) {
      const auto f = c < 0 ? FaultSet::colors({}) : FaultSet::colors({c});
      const auto live = apply_fault(g, f);
      for (Vertex u = 0; u < g.n(); ++u) {
        ShortestPathTree tu(g, m, u, &live);
        for (Vertex v = 0; v < g.n(); ++v) {
          const auto p = tu.path_to(v);
          if (!p.reachable || p.edges.empty()) continue;
          for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
            ASSERT_EQ(ShortestPathTree(g, m, p.vertices[i], &live).last_edge(v), tu.last_edge(v));
          }
        }
      }
    }
  }
}

TEST(ShortestPath, WeightMatchesUnperturbedDistance) {
  random_graphs::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto b = random_graphs::connected(25, 40, false, rng);
    random_graphs::weigh_randomly(b, 5, rng);
    const auto g = b.build();
    const TieBrokenMetric m(g, 9);
    for (Vertex s = 0; s < g.n(); s += 3) {
      ShortestPathTree t(g, m, s);
      const auto d = oracle::distances_from(g, s);
      for (Vertex v = 0; v < g.n(); ++v) {
        ASSERT_EQ(t.distance(v), std::optional<std::int64_t>(d[static_cast<std::size_t>(v)]));
        ASSERT_EQ(t.path_to(v).scaled_weight, d[static_cast<std::size_t>(v)]);
      }
    }
  }
}

TEST(TiebreakContract, ConsistencyAndStabilityOnRandomGraphs) {
  random_graphs::Rng rng(21);
  ContractReport rep;
  for (int trial = 0; trial < 6; ++trial) {
    auto b = random_graphs::connected(14, 12, trial % 2 == 0, rng);
    const auto g = b.build();
    const TieBrokenMetric m(g, 100 + static_cast<std::uint64_t>(trial));
    for (int k = 0; k < 10; ++k) {
      const Vertex u = random_graphs::uniform_vertex(g.n(), rng);
      const Vertex v = random_graphs::uniform_vertex(g.n(), rng);
      check_tiebreak_contract(g, m, u, v, FaultSet::edges({}), rep);
      check_tiebreak_contract(g, m, u, v, FaultSet::edges({static_cast<EdgeId>(k % g.m())}), rep);
    }
  }
  EXPECT_GT(rep.consistency_checks, 0u);
  EXPECT_GT(rep.stability_checks, 0u);
  EXPECT_EQ(rep.consistency_violations, 0u);
  EXPECT_EQ(rep.stability_violations, 0u);
  EXPECT_EQ(rep.weight_violations, 0u);
}

TEST(PerturbWeights, CompleteGraphBecomesUnique) {
  GraphBuilder b(4);
  for (Vertex u = 0; u < 4; ++u) {
    for (Vertex v = u + 1; v < 4; ++v) b.add_edge(u, v);
  }
  const auto g = b.build();
  const auto m = perturb_weights(g, 3);
  EXPECT_TRUE(m.uniqueness_verified());
  for (Vertex s = 0; s < 4; ++s) EXPECT_FALSE(ShortestPathTree(g, m, s).any_ambiguous());
}

TEST(PerturbWeights, TreePathsUnchanged) {
  GraphBuilder b(5);
  b.add_edge(0, 1, Weight(2));
  b.add_edge(1, 2, Weight(1, 2));
  b.add_edge(1, 3, Weight(3));
  b.add_edge(3, 4, Weight(1));
  const auto g = b.build();
  const auto m = perturb_weights(g, 1);
  EXPECT_EQ(shortest_path(g, m, 2, 4, {}).edges, (std::vector<EdgeId>{1, 2, 3}));
}

TEST(PerturbWeights, DeltaNeverFlipsStrictInequality) {
  // worst case: the heavier route has tiebreak 0, the lighter one the maximum
  GraphBuilder b(3);
  b.add_edge(0, 1, Weight(1, 3));
  b.add_edge(1, 2, Weight(1, 3));
  b.add_edge(0, 2, Weight(1, 2));
  const auto g = b.build();
  const auto delta = TieBrokenMetric::delta(g);
  const TieBrokenMetric::Rational light = TieBrokenMetric::Rational(1, 2);
  const TieBrokenMetric::Rational heavy = TieBrokenMetric::Rational(2, 3);
  // every path has at most m edges, each perturbation is below delta
  EXPECT_LT(light + delta * g.m(), heavy);
}

TEST(WithReseeding, RetriesOnUniquenessViolation) {
  const auto g = four_cycle();
  int calls = 0;
  const auto seed = with_reseeding(g, TieBrokenMetric(g, 5), [&](const TieBrokenMetric& m) {
    if (++calls < 3) throw UniquenessViolation("tie");
    return m.seed();
  });
  EXPECT_EQ(calls, 3);
  EXPECT_NE(seed, 5u);
  EXPECT_THROW(with_reseeding(g, TieBrokenMetric(g, 5), [](const TieBrokenMetric&) -> int {
    throw UniquenessViolation("tie");
  }, 2), UniquenessViolation);
}

TEST(EdgeDistance, UnitGraphIsOnePlusHops) {
  const auto g = path_graph(5);
  const TieBrokenMetric m(g, 0);
  const EdgeMask all(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) {
    const auto d = oracle::edge_distance(g, e, 4, all);
    EXPECT_EQ(d, 4 - e);
    EXPECT_EQ(edge_distance_to(g, m, e, 4, all), std::optional<std::int64_t>(4 - e));
  }
}
