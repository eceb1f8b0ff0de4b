#include <gtest/gtest.h>

#include <cmath>

#include "cftg/random_graphs.hpp"
#include "cftg/sourcewise_cft.hpp"
#include "cftg/verify.hpp"

using namespace cftg;

TEST(CftThresholds, ArithmeticInstantiation) {
  const auto s = cft_thresholds_from_base(64.0, 2, 100);
  EXPECT_EQ(s.thresholds, (std::vector<double>{16.0, 4.0}));
  EXPECT_EQ(s.suffix, (std::vector<std::size_t>{16, 4}));
  EXPECT_EQ(s.next_suffix, (std::vector<std::size_t>{16, 4, 1}));
  EXPECT_FALSE(s.collapsed);
}

TEST(CftThresholds, DeltaZeroHasNoInteriorLevels) {
  const auto s = cft_thresholds(50, 1, 0);
  EXPECT_TRUE(s.thresholds.empty());
  EXPECT_EQ(s.next_suffix, (std::vector<std::size_t>{1}));
  EXPECT_EQ(s.levels(), 1u);
}

TEST(CftThresholds, SmallBaseCollapses) {
  const auto s = cft_thresholds_from_base(0.5, 3, 100);
  EXPECT_EQ(s.thresholds, (std::vector<double>{1.0}));
  EXPECT_TRUE(s.collapsed);
  EXPECT_EQ(s.next_suffix, (std::vector<std::size_t>{1, 1}));
}

TEST(CftThresholds, FromNSigma) {
  const auto s = cft_thresholds(1000, 10, 1);
  const double base = 100.0 * std::log(1000.0);
  ASSERT_EQ(s.thresholds.size(), 1u);
  EXPECT_NEAR(s.thresholds[0], std::sqrt(base), 1e-9);
  EXPECT_EQ(s.suffix[0], static_cast<std::size_t>(std::ceil(std::sqrt(base))));
  EXPECT_THROW((void)cft_thresholds(1, 1, 1), InvalidArgument);
  EXPECT_THROW((void)cft_thresholds(10, 0, 1), InvalidArgument);
  EXPECT_THROW((void)cft_thresholds(10, 11, 1), InvalidArgument);
}

TEST(CftThresholds, StrictlyDecreasingSuffixes) {
  for (double base : {2.0, 3.7, 10.0, 100.0, 5000.0}) {
    for (std::size_t delta = 0; delta <= 5; ++delta) {
      const auto s = cft_thresholds_from_base(base, delta, 10000);
      for (std::size_t i = 1; i < s.suffix.size(); ++i) EXPECT_LT(s.suffix[i], s.suffix[i - 1]);
      EXPECT_EQ(s.next_suffix.size(), s.levels());
    }
  }
}

TEST(CftSourcewise, UncoloredGraphIsUnionOfTrees) {
  random_graphs::Rng rng(3);
  auto b = random_graphs::connected(30, 30, false, rng);
  const auto g = b.build();
  const TieBrokenMetric m(g, 4);
  const std::vector<Vertex> s{0, 5, 9};
  const auto res = build_1cft_sourcewise(g, m, s);
  Subgraph trees(g);
  for (Vertex x : s) trees.insert_all(ShortestPathTree(g, m, x).tree_edges());
  // every A_i is empty because no path changes under a fault
  for (std::size_t i = 1; i < res.hitting.sets.size(); ++i) EXPECT_TRUE(res.hitting.sets[i].empty());
  EXPECT_EQ(res.h, trees);
  EXPECT_EQ(res.r2_additions, 0u);
}

TEST(CftSourcewise, OracleExactAndContainsObviousPreserver) {
  random_graphs::Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const Vertex n = 20 + static_cast<Vertex>(rng() % 21);
    const std::size_t delta = 1 + trial % 3;
    const std::size_t sigma = std::size_t{1} << (trial % 3);
    auto b = trial % 2 == 0 ? random_graphs::connected(n, static_cast<std::size_t>(n), trial % 4 == 1, rng)
                            : random_graphs::cycle_with_chords(n, 4, false, rng);
    random_graphs::color_randomly(b, delta, 0.15, rng);
    const auto g = b.build();
    const auto sources = random_graphs::sample_sources(n, sigma, rng);
    const TieBrokenMetric m(g, 50 + static_cast<std::uint64_t>(trial));
    CftSourcewiseOptions opt;
    if (trial % 3 == 2) opt.threshold_base = 30.0;  // deeper schedules at small n
    const auto res = build_1cft_sourcewise(g, m, sources, opt);
    const auto rep = verify_distance_preserver(g, res.h, sourcewise_demands(g, sources), 1, FaultMode::Color);
    EXPECT_TRUE(rep.pass()) << "trial " << trial << " failures " << rep.failures;
    EXPECT_TRUE(res.h.includes(obvious_cft_preserver(g, m, sources))) << "trial " << trial;
    EXPECT_TRUE(verify_last_edge_closure(g, m, res.h, sources).pass());
    EXPECT_LE(res.h.size(), res.r1_additions + res.r2_additions);
    EXPECT_LE(res.r1_additions + res.r2_additions, res.size_bound);
  }
}

TEST(CftSourcewise, StressScheduleBuildsNonEmptyHittingSets) {
  random_graphs::Rng rng(23);
  auto b = random_graphs::cycle_with_chords(40, 2, false, rng);
  random_graphs::color_randomly(b, 3, 0.0, rng);
  const auto g = b.build();
  const TieBrokenMetric m(g, 1);
  const std::vector<Vertex> s{0};
  CftSourcewiseOptions opt;
  opt.threshold_base = 200.0;
  const auto res = build_1cft_sourcewise(g, m, s, opt);
  ASSERT_GE(res.hitting.sets.size(), 3u);
  std::size_t total = 0;
  for (std::size_t i = 1; i < res.hitting.sets.size(); ++i) total += res.hitting.sets[i].size();
  EXPECT_GT(total, 0u);
  EXPECT_TRUE(verify_distance_preserver(g, res.h, sourcewise_demands(g, s), 1, FaultMode::Color).pass());
}

TEST(CftSourcewise, SampledHittingAlsoExact) {
  random_graphs::Rng rng(29);
  auto b = random_graphs::cycle_with_chords(36, 3, true, rng);
  random_graphs::color_randomly(b, 2, 0.1, rng);
  const auto g = b.build();
  const TieBrokenMetric m(g, 2);
  const std::vector<Vertex> s{0, 10};
  CftSourcewiseOptions opt;
  opt.hitting = HittingMode::Sampled;
  opt.threshold_base = 120.0;
  opt.seed = 9;
  const auto res = build_1cft_sourcewise(g, m, s, opt);
  EXPECT_TRUE(res.hitting.verified);
  EXPECT_TRUE(verify_distance_preserver(g, res.h, sourcewise_demands(g, s), 1, FaultMode::Color).pass());
}

TEST(CftSourcewise, Deterministic) {
  random_graphs::Rng rng(31);
  auto b = random_graphs::connected(40, 50, false, rng);
  random_graphs::color_randomly(b, 2, 0.2, rng);
  const auto g = b.build();
  const TieBrokenMetric m(g, 77);
  const std::vector<Vertex> s{3, 4};
  CftSourcewiseOptions opt;
  opt.threshold_base = 50.0;
  EXPECT_EQ(build_1cft_sourcewise(g, m, s, opt).h, build_1cft_sourcewise(g, m, s, opt).h);
}

TEST(CftSourcewise, RejectsBadInput) {
  GraphBuilder b(3);
  b.add_edge(0, 1, Weight(2));
  const auto g = b.build();
  const TieBrokenMetric m(g, 1);
  const std::vector<Vertex> s{0};
  EXPECT_THROW((void)build_1cft_sourcewise(g, m, s), InvalidArgument);
  GraphBuilder u(3);
  u.add_edge(0, 1);
  const auto gu = u.build();
  const TieBrokenMetric mu(gu, 1);
  EXPECT_THROW((void)build_1cft_sourcewise(gu, mu, std::vector<Vertex>{}), InvalidArgument);
  EXPECT_THROW((void)build_1cft_sourcewise(gu, mu, std::vector<Vertex>{3}), InvalidArgument);
}
