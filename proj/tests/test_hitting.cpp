#include <gtest/gtest.h>

#include <set>

#include "cftg/hitting.hpp"
#include "cftg/random_graphs.hpp"

using namespace cftg;

namespace {

SuffixFamily family_of(std::vector<std::vector<Vertex>> members) {
  SuffixFamily f;
  f.members = std::move(members);
  return f;
}

bool hits_all(const SuffixFamily& f, const std::vector<Vertex>& set) {
  const std::set<Vertex> s(set.begin(), set.end());
  for (const auto& m : f.members) {
    if (std::none_of(m.begin(), m.end(), [&](Vertex v) { return s.count(v) > 0; })) return false;
  }
  return true;
}

// Every (t, c) with dist(s, t | c) > d, by direct path queries.
std::vector<std::vector<Vertex>> brute_suffixes(const ColoredGraph& g, const TieBrokenMetric& m, Vertex s, double d,
                                               std::size_t len) {
  std::vector<std::vector<Vertex>> out;
  std::vector<FaultSet> faults{FaultSet::colors({})};
  for (ColorId c : g.used_colors()) faults.push_back(FaultSet::colors({c}));
  for (const auto& f : faults) {
    for (Vertex t = 0; t < g.n(); ++t) {
      const auto p = shortest_path(g, m, s, t, f);
      if (!p.reachable || static_cast<double>(p.length()) <= d) continue;
      const auto sv = p.suffix_vertices(len);
      out.emplace_back(sv.begin(), sv.end());
    }
  }
  return out;
}

}  // namespace

TEST(GreedyHittingSet, CommonElement) {
  EXPECT_EQ(greedy_hitting_set(family_of({{1, 2}, {2, 3}})), (std::vector<Vertex>{2}));
}

TEST(GreedyHittingSet, DisjointSetsNeedOneEach) {
  const auto f = family_of({{0, 1}, {2, 3}, {4}, {5, 6, 7}});
  const auto h = greedy_hitting_set(f);
  EXPECT_EQ(h.size(), 4u);
  EXPECT_TRUE(hits_all(f, h));
}

TEST(GreedyHittingSet, EmptyFamilyAndEmptyMember) {
  EXPECT_TRUE(greedy_hitting_set(family_of({})).empty());
  EXPECT_THROW((void)greedy_hitting_set(family_of({{1}, {}})), InvalidArgument);
}

TEST(GreedyHittingSet, RandomFamiliesAreHitWithinFamilySize) {
  random_graphs::Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<Vertex>> members;
    const int k = 1 + trial % 15;
    for (int i = 0; i < k; ++i) {
      std::set<Vertex> m;
      const int sz = 1 + static_cast<int>(rng() % 4);
      while (static_cast<int>(m.size()) < sz) m.insert(static_cast<Vertex>(rng() % 20));
      members.emplace_back(m.begin(), m.end());
    }
    const auto f = family_of(members);
    const auto h = greedy_hitting_set(f);
    EXPECT_TRUE(hits_all(f, h));
    EXPECT_LE(h.size(), f.members.size());
    EXPECT_EQ(h, greedy_hitting_set(f));
    EXPECT_FALSE(first_unhit(f, h, 20).has_value());
  }
}

TEST(BuildHittingFamily, UncoloredStarNeedsNothing) {
  GraphBuilder b(6);
  for (Vertex v = 1; v < 6; ++v) b.add_edge(0, v);
  const auto g = b.build();
  const TieBrokenMetric m(g, 1);
  const std::vector<Vertex> s{0};
  const std::vector<Threshold> th{{1.0, 1}};
  const auto fam = build_hitting_family(g, m, s, th, {FaultMode::Color, 1}, ThresholdTest::Greater);
  ASSERT_EQ(fam.sets.size(), 2u);
  EXPECT_EQ(fam.sets[0], s);
  EXPECT_TRUE(fam.sets[1].empty());
  EXPECT_TRUE(fam.verified);
}

TEST(BuildHittingFamily, PathGraphHitsEverySuffix) {
  GraphBuilder b(10);
  const auto red = b.color("red");
  for (Vertex v = 0; v < 9; ++v) b.add_edge(v, v + 1, Weight(1), v == 4 ? red : kNoColor);
  b.add_edge(0, 9);  // keeps 5..9 reachable once red fails
  const auto g = b.build();
  const TieBrokenMetric m(g, 2);
  const std::vector<Vertex> s{0};
  const std::vector<Threshold> th{{3.0, 3}};
  const auto fam = build_hitting_family(g, m, s, th, {FaultMode::Color, 1}, ThresholdTest::Greater);
  const auto oracle = family_of(brute_suffixes(g, m, 0, 3.0, 3));
  EXPECT_FALSE(oracle.members.empty());
  EXPECT_TRUE(hits_all(oracle, fam.sets[1]));
}

TEST(BuildHittingFamily, SampledModeVerifiesOnRandomGraphs) {
  random_graphs::Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    auto b = random_graphs::cycle_with_chords(30, 3, false, rng);
    random_graphs::color_randomly(b, 2, 0.3, rng);
    const auto g = b.build();
    const TieBrokenMetric m(g, 3);
    const std::vector<Vertex> s{0, 7};
    const std::vector<Threshold> th{{6.0, 6}, {3.0, 3}};
    HittingOptions opt;
    opt.mode = HittingMode::Sampled;
    opt.seed = static_cast<std::uint64_t>(trial);
    const auto fam = build_hitting_family(g, m, s, th, {FaultMode::Color, 1}, ThresholdTest::Greater, opt);
    EXPECT_TRUE(fam.verified);
    for (std::size_t i = 0; i < th.size(); ++i) {
      EXPECT_EQ(fam.sets[i + 1].size(), sampled_hitting_size(30, th[i].value));
      std::vector<std::vector<Vertex>> all;
      for (Vertex src : s) {
        auto part = brute_suffixes(g, m, src, th[i].value, th[i].suffix_edges);
        all.insert(all.end(), part.begin(), part.end());
      }
      EXPECT_TRUE(hits_all(family_of(all), fam.sets[i + 1]));
    }
  }
}

TEST(BuildHittingFamily, EdgeModeCoversEveryFaultSet) {
  random_graphs::Rng rng(12);
  auto b = random_graphs::cycle_with_chords(12, 2, false, rng);
  const auto g = b.build();
  const TieBrokenMetric m(g, 5);
  const std::vector<Vertex> s{0};
  const std::vector<Threshold> th{{3.0, 3}};
  const auto fam = build_hitting_family(g, m, s, th, {FaultMode::Edge, 2}, ThresholdTest::GreaterEqual);
  ASSERT_TRUE(fam.verified);
  std::vector<std::vector<Vertex>> all;
  for (EdgeId a = -1; a < g.m(); ++a) {
    for (EdgeId c = a; c < g.m(); ++c) {
      std::vector<EdgeId> fs;
      if (a >= 0) fs.push_back(a);
      if (c >= 0 && c != a) fs.push_back(c);
      for (Vertex t = 0; t < g.n(); ++t) {
        const auto p = shortest_path(g, m, 0, t, FaultSet::edges(fs));
        if (p.reachable && p.length() >= 3) {
          const auto sv = p.suffix_vertices(3);
          all.emplace_back(sv.begin(), sv.end());
        }
      }
    }
  }
  EXPECT_TRUE(hits_all(family_of(all), fam.sets[1]));
}

TEST(BuildHittingFamily, LargeEdgeBudgetIsSampledAndFlagged) {
  GraphBuilder b(8);
  for (Vertex v = 0; v < 7; ++v) b.add_edge(v, v + 1);
  const auto g = b.build();
  const TieBrokenMetric m(g, 1);
  const std::vector<Vertex> s{0};
  const std::vector<Threshold> th{{4.0, 4}, {2.0, 2}, {1.5, 2}};
  const auto fam = build_hitting_family(g, m, s, th, {FaultMode::Edge, 3}, ThresholdTest::GreaterEqual);
  EXPECT_FALSE(fam.verified);
  EXPECT_EQ(fam.sets.size(), 4u);
}

TEST(BuildHittingFamily, RejectsNonDecreasingColorThresholds) {
  GraphBuilder b(2);
  b.add_edge(0, 1);
  const auto g = b.build();
  const TieBrokenMetric m(g, 1);
  const std::vector<Vertex> s{0};
  const std::vector<Threshold> th{{2.0, 2}, {2.0, 2}};
  EXPECT_THROW((void)build_hitting_family(g, m, s, th, {FaultMode::Color, 1}, ThresholdTest::Greater),
               InvalidArgument);
}

TEST(SampledHittingSize, FormulaAndCap) {
  EXPECT_EQ(sampled_hitting_size(100, 50.0), static_cast<std::size_t>(std::ceil(8.0 * std::log(100.0))));
  EXPECT_EQ(sampled_hitting_size(10, 1.0), 10u);
}
