#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "cftg/error.hpp"
#include "cftg/graph.hpp"
#include "cftg/metric.hpp"

namespace cftg {

// Vertex sets of path suffixes that a hitting set must intersect.
struct SuffixFamily {
  std::vector<std::vector<Vertex>> members;  // each sorted, duplicate-free
  double threshold = 0.0;
  std::size_t suffix_edges = 0;
};

// Index of the first member disjoint from `set`, or nullopt if all are hit.
inline std::optional<std::size_t> first_unhit(const SuffixFamily& family, std::span<const Vertex> set, Vertex n) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Vertex v : set) in[static_cast<std::size_t>(v)] = 1;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& mem = family.members[i];
    if (std::none_of(mem.begin(), mem.end(), [&](Vertex v) { return in[static_cast<std::size_t>(v)] != 0; })) return i;
  }
  return std::nullopt;
}

// Classical greedy: repeatedly take the vertex in the most unhit members,
// breaking ties toward the smaller id.
inline std::vector<Vertex> greedy_hitting_set(const SuffixFamily& family) {
  Vertex n = 0;
  for (const auto& mem : family.members) {
    if (mem.empty()) throw InvalidArgument("hitting set family contains an empty member");
    for (Vertex v : mem) n = std::max(n, v + 1);
  }
  std::vector<std::vector<std::size_t>> occurs(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    for (Vertex v : family.members[i]) occurs[static_cast<std::size_t>(v)].push_back(i);
  }
  std::vector<std::size_t> count(static_cast<std::size_t>(n));
  using Entry = std::pair<std::size_t, Vertex>;  // (count, -vertex) ordering via comparator
  auto cmp = [](const Entry& a, const Entry& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> pq(cmp);
  for (Vertex v = 0; v < n; ++v) {
    count[static_cast<std::size_t>(v)] = occurs[static_cast<std::size_t>(v)].size();
    if (count[static_cast<std::size_t>(v)] > 0) pq.emplace(count[static_cast<std::size_t>(v)], v);
  }
  std::vector<char> hit(family.members.size(), 0);
  std::vector<Vertex> chosen;
  while (!pq.empty()) {
    auto [c, v] = pq.top();
    pq.pop();
    if (c != count[static_cast<std::size_t>(v)] || c == 0) continue;
    chosen.push_back(v);
    for (std::size_t i : occurs[static_cast<std::size_t>(v)]) {
      if (hit[i] != 0) continue;
      hit[i] = 1;
      for (Vertex u : family.members[i]) {
        auto& cu = count[static_cast<std::size_t>(u)];
        --cu;
        if (u != v && cu > 0) pq.emplace(cu, u);
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

enum class HittingMode { Greedy, Sampled };

// Whether a path of length L must be hit when L > threshold (color faults)
// or when L >= threshold (edge faults).
enum class ThresholdTest { Greater, GreaterEqual };

struct Threshold {
  double value;             // real threshold used in comparisons
  std::size_t suffix_edges;  // ceil(value): suffix length to hit
};

// The fault sets a hitting family must cover: every single color
// (budget 1, COLOR mode) or every edge set of size <= budget (EDGE mode).
struct FaultModel {
  FaultMode mode = FaultMode::Color;
  std::size_t budget = 1;
};

namespace hitting_detail {

// Calls visit(tree) once for every distinct replacement-path tree
// pi(s, . | F) over the fault model. Only faults touching the current tree can
// change it, so the enumeration walks tree edges (or tree colors) instead of
// all of E.
template <typename Visit>
void for_each_fault_tree(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex s, const FaultModel& model,
                         Visit&& visit) {
  if (model.mode == FaultMode::Color) {
    if (model.budget != 1) throw InvalidArgument("color fault families support budget 1 only");
    ShortestPathTree base(g, metric, s);
    std::set<ColorId> tree_colors;
    for (EdgeId e : base.tree_edges()) {
      if (g.edge(e).color != kNoColor) tree_colors.insert(g.edge(e).color);
    }
    // A color absent from the tree leaves every path unchanged.
    if (g.used_colors().size() > tree_colors.size()) visit(base);
    for (ColorId c : tree_colors) {
      const EdgeMask live = apply_fault(g, FaultSet::colors({c}));
      visit(ShortestPathTree(g, metric, s, &live));
    }
    return;
  }
  std::set<std::vector<EdgeId>> seen;
  std::vector<std::vector<EdgeId>> stack{{}};
  seen.insert({});
  while (!stack.empty()) {
    auto faults = std::move(stack.back());
    stack.pop_back();
    const EdgeMask live = apply_fault(g, FaultSet::edges(faults));
    ShortestPathTree tree(g, metric, s, &live);
    if (faults.size() < model.budget) {
      for (EdgeId e : tree.tree_edges()) {
        auto next = faults;
        next.insert(std::upper_bound(next.begin(), next.end(), e), e);
        if (seen.insert(next).second) stack.push_back(std::move(next));
      }
    }
    visit(tree);
  }
}

}  // namespace hitting_detail

// One suffix family per threshold, enumerated over all s in sources, t in V
// and faults in the model. Requires unit weights (distance = hop count).
inline std::vector<SuffixFamily> suffix_families(const ColoredGraph& g, const TieBrokenMetric& metric,
                                                 std::span<const Vertex> sources, std::span<const Threshold> thresholds,
                                                 const FaultModel& model, ThresholdTest test) {
  if (!g.unit_weight()) throw InvalidArgument("suffix families require an unweighted graph");
  std::vector<std::set<std::vector<Vertex>>> acc(thresholds.size());
  for (Vertex s : sources) {
    hitting_detail::for_each_fault_tree(g, metric, s, model, [&](const ShortestPathTree& tree) {
      for (Vertex t = 0; t < g.n(); ++t) {
        if (!tree.reached(t) || t == s) continue;
        const auto len = static_cast<double>(tree.hops(t));
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
          const bool needed = test == ThresholdTest::Greater ? len > thresholds[i].value : len >= thresholds[i].value;
          if (!needed) continue;
          auto verts = tree.suffix_vertices(t, thresholds[i].suffix_edges);
          std::sort(verts.begin(), verts.end());
          acc[i].insert(std::move(verts));
        }
      }
    });
  }
  std::vector<SuffixFamily> out(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    out[i].threshold = thresholds[i].value;
    out[i].suffix_edges = thresholds[i].suffix_edges;
    out[i].members.assign(acc[i].begin(), acc[i].end());
  }
  return out;
}

struct HittingOptions {
  HittingMode mode = HittingMode::Greedy;
  std::uint64_t seed = 0;
  int sample_attempts = 16;
  // EDGE-mode families are enumerated (and verified) only up to this budget;
  // above it the sets are sampled and left unverified.
  std::size_t exhaustive_edge_budget = 2;
};

// A_0 = S followed by one hitting set per threshold.
struct HittingFamily {
  std::vector<std::vector<Vertex>> sets;
  std::vector<Threshold> thresholds;  // thresholds[i] belongs to sets[i + 1]
  HittingMode mode = HittingMode::Greedy;
  std::uint64_t seed = 0;
  bool verified = false;
};

// Size ceil(4 (n / d) ln n), the sampling target for threshold d.
inline std::size_t sampled_hitting_size(Vertex n, double threshold) {
  if (n < 2) return static_cast<std::size_t>(n);
  const double want = std::ceil(4.0 * (static_cast<double>(n) / threshold) * std::log(static_cast<double>(n)));
  return static_cast<std::size_t>(std::min<double>(want, n));
}

inline std::vector<Vertex> sample_vertices(Vertex n, std::size_t k, std::mt19937_64& rng) {
  std::vector<Vertex> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(k, all.size()));
  std::sort(all.begin(), all.end());
  return all;
}

inline HittingFamily build_hitting_family(const ColoredGraph& g, const TieBrokenMetric& metric,
                                          std::span<const Vertex> sources, std::span<const Threshold> thresholds,
                                          const FaultModel& model, ThresholdTest test,
                                          const HittingOptions& options = {}) {
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i].value < thresholds[i - 1].value) && model.mode == FaultMode::Color) {
      throw InvalidArgument("thresholds must be strictly decreasing");
    }
  }
  HittingFamily fam;
  fam.mode = options.mode;
  fam.seed = options.seed;
  fam.thresholds.assign(thresholds.begin(), thresholds.end());
  std::vector<Vertex> s0(sources.begin(), sources.end());
  std::sort(s0.begin(), s0.end());
  s0.erase(std::unique(s0.begin(), s0.end()), s0.end());
  fam.sets.push_back(std::move(s0));

  const bool enumerable = model.mode == FaultMode::Color || model.budget <= options.exhaustive_edge_budget;
  std::mt19937_64 rng(options.seed);
  if (!enumerable) {
    for (const auto& th : thresholds) fam.sets.push_back(sample_vertices(g.n(), sampled_hitting_size(g.n(), th.value), rng));
    fam.verified = false;
    return fam;
  }

  const auto families = suffix_families(g, metric, sources, thresholds, model, test);
  for (const auto& family : families) {
    if (options.mode == HittingMode::Greedy) {
      fam.sets.push_back(greedy_hitting_set(family));
    } else {
      const auto k = sampled_hitting_size(g.n(), family.threshold);
      std::optional<std::vector<Vertex>> found;
      for (int attempt = 0; attempt < options.sample_attempts && !found; ++attempt) {
        auto cand = sample_vertices(g.n(), k, rng);
        if (!first_unhit(family, cand, g.n())) found = std::move(cand);
      }
      if (!found) {
        throw RetryExhausted("sampled hitting set failed verification " + std::to_string(options.sample_attempts) +
                             " times");
      }
      fam.sets.push_back(std::move(*found));
    }
    if (first_unhit(family, fam.sets.back(), g.n())) throw Error("hitting set misses a family member");
  }
  fam.verified = true;
  return fam;
}

}  // namespace cftg
