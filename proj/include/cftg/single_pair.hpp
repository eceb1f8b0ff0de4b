#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "cftg/derived.hpp"
#include "cftg/error.hpp"
#include "cftg/graph.hpp"
#include "cftg/metric.hpp"

namespace cftg {

// Non-FT pairwise preserver: the union of the unique shortest paths.
inline Subgraph build_pairwise_dp(const ColoredGraph& g, const TieBrokenMetric& metric, const PairSet& pairs) {
  Subgraph h(g);
  std::map<Vertex, std::vector<Vertex>> by_source;
  for (auto [x, y] : pairs) by_source[x].push_back(y);
  for (const auto& [x, ys] : by_source) {
    ShortestPathTree tree(g, metric, x);
    for (Vertex y : ys) h.insert_all(tree.path_to(y).edges);
  }
  return h;
}

// pi(v_0, u_0) . e_1 . pi(v_1, u_1) . ... . e_l . pi(v_l, u_l)
struct Decomposition {
  struct Segment {
    Vertex v = 0;  // start
    Vertex u = 0;  // end
    std::vector<EdgeId> edges;
  };
  std::vector<Segment> segments;
  std::vector<EdgeId> interleaving;  // e_1..e_l

  [[nodiscard]] std::size_t ell() const noexcept { return interleaving.size(); }
  // E(c)
  [[nodiscard]] const std::vector<EdgeId>& edge_set() const noexcept { return interleaving; }
  // P(c): the interior pairs (v_i, u_i), 1 <= i <= l - 1.
  [[nodiscard]] std::vector<std::pair<Vertex, Vertex>> interior_pairs() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (std::size_t i = 1; i + 1 < segments.size(); ++i) out.emplace_back(segments[i].v, segments[i].u);
    return out;
  }
  // Concatenation back into one edge list.
  [[nodiscard]] std::vector<EdgeId> concatenated() const {
    std::vector<EdgeId> out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (i > 0) out.push_back(interleaving[i - 1]);
      out.insert(out.end(), segments[i].edges.begin(), segments[i].edges.end());
    }
    return out;
  }
};

// Greedy maximal-prefix split of `path` into fault-free shortest segments and
// interleaving edges. With max_interleaving set, exceeding it throws.
inline Decomposition restoration_decompose(const ColoredGraph& g, const TieBrokenMetric& metric, const Path& path,
                                           std::optional<std::size_t> max_interleaving = std::nullopt) {
  Decomposition d;
  if (!path.reachable) throw InvalidArgument("cannot decompose an empty path between distinct vertices");
  const auto& vs = path.vertices;
  const auto& es = path.edges;
  std::size_t start = 0;
  while (true) {
    ShortestPathTree tree(g, metric, vs[start]);
    std::size_t j = start;
    // Extend while the next edge is the tree edge into the next vertex: the
    // segment then stays the unique shortest path between its endpoints.
    while (j < es.size() && tree.parent_edge(vs[j + 1]) == es[j] && tree.parent_vertex(vs[j + 1]) == vs[j]) {
      tree.require_unique(vs[j + 1]);
      ++j;
    }
    Decomposition::Segment seg{vs[start], vs[j], {}};
    seg.edges.assign(es.begin() + static_cast<std::ptrdiff_t>(start), es.begin() + static_cast<std::ptrdiff_t>(j));
    d.segments.push_back(std::move(seg));
    if (j == es.size()) break;
    d.interleaving.push_back(es[j]);
    start = j + 1;
    if (max_interleaving && d.interleaving.size() > *max_interleaving) {
      throw Error("decomposition needs more than " + std::to_string(*max_interleaving) + " interleaving edges");
    }
  }
  return d;
}

struct SinglePairResult {
  Subgraph h;
  std::size_t tree_edges = 0;         // |T_s u T_t|
  std::size_t interleaving_edges = 0; // |u_c E(c)|
  std::size_t dp_edges = 0;           // |DP(u_c P(c))|
  std::size_t path_colors = 0;        // colors on pi(s, t)
  std::map<ColorId, Decomposition> decompositions{};
};

// 1-CFT (s, t)-distance preserver for weighted undirected graphs:
// T_s u T_t u E(c) u DP(P(c)) over the colors c on pi(s, t).
inline SinglePairResult build_1cft_single_pair(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex s,
                                               Vertex t) {
  if (g.directed()) throw InvalidArgument("single-pair preserver needs an undirected graph");
  if (s < 0 || s >= g.n() || t < 0 || t >= g.n()) throw InvalidArgument("pair endpoint out of range");
  SinglePairResult res{.h = Subgraph(g)};
  ShortestPathTree ts(g, metric, s);
  ShortestPathTree tt(g, metric, t);
  res.h.insert_all(ts.tree_edges());
  res.h.insert_all(tt.tree_edges());
  res.tree_edges = res.h.size();

  const Path base = ts.path_to(t);
  const auto colors = derived_detail::path_colors(g, base.edges);
  res.path_colors = colors.size();
  std::set<EdgeId> interleaving;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (ColorId c : colors) {
    const Path p = shortest_path(g, metric, s, t, FaultSet::colors({c}));
    if (!p.reachable) continue;
    auto d = restoration_decompose(g, metric, p, g.color_class(c).size());
    interleaving.insert(d.interleaving.begin(), d.interleaving.end());
    for (auto pr : d.interior_pairs()) pairs.push_back(pr);
    res.decompositions.emplace(c, std::move(d));
  }
  res.interleaving_edges = interleaving.size();
  for (EdgeId e : interleaving) res.h.insert(e);
  const Subgraph dp = build_pairwise_dp(g, metric, PairSet(std::move(pairs), g.n()));
  res.dp_edges = dp.size();
  res.h.merge(dp);
  return res;
}

}  // namespace cftg
