#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "cftg/error.hpp"
#include "cftg/graph.hpp"
#include "cftg/hitting.hpp"
#include "cftg/metric.hpp"
#include "cftg/sourcewise_cft.hpp"

namespace cftg {

// Ordered demand pairs, validated and duplicate-free.
class PairSet {
 public:
  PairSet() = default;
  PairSet(std::vector<std::pair<Vertex, Vertex>> pairs, Vertex n) : pairs_(std::move(pairs)) {
    for (auto [s, t] : pairs_) {
      if (s < 0 || s >= n || t < 0 || t >= n) throw InvalidArgument("pair endpoint out of range");
    }
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  }

  [[nodiscard]] const std::vector<std::pair<Vertex, Vertex>>& pairs() const noexcept { return pairs_; }
  [[nodiscard]] std::size_t size() const noexcept { return pairs_.size(); }
  [[nodiscard]] bool empty() const noexcept { return pairs_.empty(); }
  [[nodiscard]] auto begin() const { return pairs_.begin(); }
  [[nodiscard]] auto end() const { return pairs_.end(); }

  [[nodiscard]] std::vector<Vertex> sources() const {
    std::vector<Vertex> out;
    for (auto [s, t] : pairs_) out.push_back(s);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::vector<std::pair<Vertex, Vertex>> pairs_;
};

struct ShortTriplet {
  Vertex s = 0;
  Vertex t = 0;
  ColorId color = kNoColor;
  std::vector<ColorId> path_colors;  // colors on pi(s, t | color)
  std::optional<std::size_t> good_round;
};

struct ShortTripletRounds {
  double ell_real = 0.0;
  std::size_t ell = 0;
  std::size_t rounds = 0;  // ceil(40 ell ln n)
  std::uint64_t seed = 0;
  std::vector<std::vector<ColorId>> sampled;  // F_i per round
  std::vector<ShortTriplet> ledger;
};

// ell = (n^2 / |P|)^((delta + 1) / (2 delta + 3)).
inline double pairwise_ell(Vertex n, std::size_t pairs, std::size_t delta) {
  const double dn = static_cast<double>(n);
  const double e = static_cast<double>(delta + 1) / static_cast<double>(2 * delta + 3);
  return std::pow(dn * dn / static_cast<double>(std::max<std::size_t>(1, pairs)), e);
}

struct PairwiseOptions {
  std::uint64_t seed = 0;
  std::optional<double> ell;  // replaces the formula
  int max_reseeds = 5;
  CftSourcewiseOptions sourcewise;
};

struct PairwiseResult {
  Subgraph h;
  std::vector<Vertex> hitting{};  // S, hits every long pi(s, t | c)
  ShortTripletRounds rounds{};
  std::size_t long_triplets = 0;
  std::size_t short_triplets = 0;
  int reseeds = 0;
};

namespace derived_detail {

inline std::vector<ColorId> path_colors(const ColoredGraph& g, std::span<const EdgeId> edges) {
  std::vector<ColorId> out;
  for (EdgeId e : edges) {
    if (g.edge(e).color != kNoColor) out.push_back(g.edge(e).color);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace derived_detail

// 1-CFT P-distance preserver for unweighted graphs. Every fault-free pi(s, t)
// is kept; triplets whose color lies on pi(s, t) are split into long ones
// (routed through a hitting set S and S x V, V x S sourcewise preservers)
// and short ones (covered by sampled color rounds, reseeded until every short
// triplet has a good round).
inline PairwiseResult build_1cft_pairwise(const ColoredGraph& g, const TieBrokenMetric& metric, const PairSet& pairs,
                                          const PairwiseOptions& options = {}) {
  using derived_detail::path_colors;
  if (!g.unit_weight()) throw InvalidArgument("1-CFT pairwise preserver needs an unweighted graph");
  PairwiseResult res{.h = Subgraph(g)};
  auto& rounds = res.rounds;
  rounds.ell_real = options.ell ? *options.ell
                                : pairwise_ell(std::max<Vertex>(2, g.n()), pairs.size(), g.delta());
  rounds.ell = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(rounds.ell_real - 1e-9)));
  const double ln_n = std::log(static_cast<double>(std::max<Vertex>(2, g.n())));
  rounds.rounds = static_cast<std::size_t>(std::ceil(40.0 * static_cast<double>(rounds.ell) * ln_n));

  SuffixFamily long_paths;
  for (auto [s, t] : pairs) {
    if (s == t) continue;
    ShortestPathTree tree(g, metric, s);
    const Path base = tree.path_to(t);
    if (!base.reachable) continue;
    res.h.insert_all(base.edges);
    for (ColorId c : path_colors(g, base.edges)) {
      const Path p = shortest_path(g, metric, s, t, FaultSet::colors({c}));
      if (!p.reachable) continue;
      if (p.length() >= rounds.ell) {
        auto verts = p.vertices;
        std::sort(verts.begin(), verts.end());
        long_paths.members.push_back(std::move(verts));
        ++res.long_triplets;
      } else {
        rounds.ledger.push_back({s, t, c, path_colors(g, p.edges), std::nullopt});
        ++res.short_triplets;
      }
    }
  }

  res.hitting = greedy_hitting_set(long_paths);
  if (!res.hitting.empty()) {
    res.h.insert_all(build_1cft_sourcewise(g, metric, res.hitting, options.sourcewise).h.edge_ids());
    if (g.directed()) {
      const ColoredGraph rev = g.reversed();
      res.h.insert_all(build_1cft_sourcewise(rev, metric, res.hitting, options.sourcewise).h.edge_ids());
    }
  }

  if (rounds.ledger.empty()) return res;
  const auto colors = g.used_colors();
  const auto sources = pairs.sources();
  for (int attempt = 0; attempt <= options.max_reseeds; ++attempt) {
    rounds.seed = options.seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL;
    std::mt19937_64 rng(rounds.seed);
    std::bernoulli_distribution keep(1.0 / static_cast<double>(rounds.ell));
    rounds.sampled.assign(rounds.rounds, {});
    for (auto& tr : rounds.ledger) tr.good_round.reset();
    Subgraph added(g);
    for (std::size_t r = 0; r < rounds.rounds; ++r) {
      auto& fr = rounds.sampled[r];
      for (ColorId c : colors) {
        if (keep(rng)) fr.push_back(c);
      }
      const EdgeMask live = apply_fault(g, FaultSet::colors(fr));
      for (Vertex s : sources) {
        ShortestPathTree tree(g, metric, s, &live);
        for (auto it = std::lower_bound(pairs.begin(), pairs.end(), std::pair{s, Vertex{0}});
             it != pairs.end() && it->first == s; ++it) {
          const Vertex t = it->second;
          if (t == s || !tree.reached(t) || static_cast<std::size_t>(tree.hops(t)) >= rounds.ell) continue;
          added.insert_all(tree.path_to(t).edges);
        }
      }
      for (auto& tr : rounds.ledger) {
        if (tr.good_round || !std::binary_search(fr.begin(), fr.end(), tr.color)) continue;
        const bool clean = std::none_of(tr.path_colors.begin(), tr.path_colors.end(), [&](ColorId x) {
          return std::binary_search(fr.begin(), fr.end(), x);
        });
        if (clean) tr.good_round = r;
      }
    }
    const bool covered = std::all_of(rounds.ledger.begin(), rounds.ledger.end(),
                                     [](const ShortTriplet& tr) { return tr.good_round.has_value(); });
    if (covered) {
      res.h.merge(added);
      res.reseeds = attempt;
      return res;
    }
  }
  throw RetryExhausted("short triplets left without a good round after " + std::to_string(options.max_reseeds) +
                       " reseeds");
}

// ell = (n ln n)^(1 - 1/(delta + 2)).
inline double spanner_ell(Vertex n, std::size_t delta) {
  const double dn = static_cast<double>(std::max<Vertex>(2, n));
  return std::pow(dn * std::log(dn), 1.0 - 1.0 / static_cast<double>(delta + 2));
}

struct SpannerOptions {
  std::optional<double> ell;  // replaces the formula
  CftSourcewiseOptions sourcewise;
};

struct SpannerResult {
  Subgraph h;
  std::size_t ell = 0;
  std::vector<Vertex> colorful{};
  std::vector<Vertex> hitting{};  // S
  std::size_t dull_edges = 0;
  std::size_t source_edges = 0;
  std::size_t max_dull_degree = 0;
};

namespace derived_detail {

// Color key for the colorful test: uncolored edges count as distinct colors.
inline std::int64_t color_key(const Edge& e) {
  return e.color == kNoColor ? -1 - static_cast<std::int64_t>(e.id) : e.color;
}

inline std::size_t distinct_incident_colors(const ColoredGraph& g, Vertex v) {
  std::set<std::int64_t> keys;
  for (const Arc& a : g.out_arcs(v)) {
    if (a.to != v) keys.insert(color_key(g.edge(a.edge)));
  }
  return keys.size();
}

}  // namespace derived_detail

// 1-CFT +2 spanner for unweighted undirected graphs: all edges at dull
// vertices plus a 1-CFT S x V preserver, where S gives each colorful vertex two
// differently colored edges into S.
inline SpannerResult build_1cft_plus2_spanner(const ColoredGraph& g, const TieBrokenMetric& metric,
                                              const SpannerOptions& options = {}) {
  using derived_detail::color_key;
  if (g.directed()) throw InvalidArgument("+2 spanner needs an undirected graph");
  if (!g.unit_weight()) throw InvalidArgument("+2 spanner needs an unweighted graph");
  SpannerResult res{.h = Subgraph(g)};
  const double ell_real = options.ell ? *options.ell : spanner_ell(g.n(), g.delta());
  res.ell = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(ell_real - 1e-9)));

  std::vector<char> is_colorful(static_cast<std::size_t>(g.n()), 0);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (derived_detail::distinct_incident_colors(g, v) >= res.ell) {
      is_colorful[static_cast<std::size_t>(v)] = 1;
      res.colorful.push_back(v);
      continue;
    }
    std::size_t degree = 0;
    for (const Arc& a : g.out_arcs(v)) {
      res.h.insert(a.edge);
      ++degree;
    }
    res.max_dull_degree = std::max(res.max_dull_degree, degree);
  }
  res.dull_edges = res.h.size();
  if (res.max_dull_degree > res.ell * std::max<std::size_t>(1, g.delta())) {
    throw Error("dull vertex exceeds degree ell * delta");
  }

  // Greedy S: repeatedly add the vertex that advances the most unsatisfied
  // colorful vertices. A colorful x is satisfied once two of its edges into S
  // carry different color keys.
  std::vector<char> in_s(static_cast<std::size_t>(g.n()), 0);
  auto keys_into_s = [&](Vertex x) {
    std::set<std::int64_t> keys;
    for (const Arc& a : g.out_arcs(x)) {
      if (a.to != x && in_s[static_cast<std::size_t>(a.to)] != 0) keys.insert(color_key(g.edge(a.edge)));
    }
    return keys;
  };
  std::vector<Vertex> pending = res.colorful;
  while (true) {
    std::erase_if(pending, [&](Vertex x) { return keys_into_s(x).size() >= 2; });
    if (pending.empty()) break;
    std::map<Vertex, std::size_t> gain;
    for (Vertex x : pending) {
      const auto have = keys_into_s(x);
      std::set<Vertex> helps;
      for (const Arc& a : g.out_arcs(x)) {
        if (a.to == x || in_s[static_cast<std::size_t>(a.to)] != 0) continue;
        if (have.empty() || have.count(color_key(g.edge(a.edge))) == 0) helps.insert(a.to);
      }
      for (Vertex y : helps) ++gain[y];
    }
    if (gain.empty()) throw Error("colorful vertex cannot reach two colors into S");
    const auto best = std::max_element(gain.begin(), gain.end(), [](const auto& a, const auto& b) {
      return a.second < b.second;  // first maximum keeps the smallest id
    });
    in_s[static_cast<std::size_t>(best->first)] = 1;
  }
  for (Vertex v = 0; v < g.n(); ++v) {
    if (in_s[static_cast<std::size_t>(v)] != 0) res.hitting.push_back(v);
  }
  if (!res.hitting.empty()) {
    const auto src = build_1cft_sourcewise(g, metric, res.hitting, options.sourcewise);
    res.source_edges = src.h.size();
    res.h.insert_all(src.h.edge_ids());
  }
  return res;
}

}  // namespace cftg
