#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "cftg/graph.hpp"

// Plain distance and reachability computations with no tiebreaking. The
// verifiers compare values produced here, so they never depend on a
// builder's metric.
namespace cftg::oracle {

inline constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

// Scaled distances from s over live edges; kInf when unreachable.
inline std::vector<std::int64_t> distances_from(const ColoredGraph& g, Vertex s, const EdgeMask& live) {
  std::vector<std::int64_t> dist(static_cast<std::size_t>(g.n()), kInf);
  dist[static_cast<std::size_t>(s)] = 0;
  if (g.unit_weight()) {
    std::deque<Vertex> q{s};
    while (!q.empty()) {
      const Vertex u = q.front();
      q.pop_front();
      for (const Arc& a : g.out_arcs(u)) {
        if (!live(a.edge)) continue;
        auto& d = dist[static_cast<std::size_t>(a.to)];
        if (d == kInf) {
          d = dist[static_cast<std::size_t>(u)] + 1;
          q.push_back(a.to);
        }
      }
    }
    return dist;
  }
  using Item = std::pair<std::int64_t, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0, s);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[static_cast<std::size_t>(u)]) continue;
    for (const Arc& a : g.out_arcs(u)) {
      if (!live(a.edge)) continue;
      const std::int64_t nd = d + g.scaled_weight(a.edge);
      auto& cur = dist[static_cast<std::size_t>(a.to)];
      if (nd < cur) {
        cur = nd;
        pq.emplace(nd, a.to);
      }
    }
  }
  return dist;
}

inline std::vector<std::int64_t> distances_from(const ColoredGraph& g, Vertex s) {
  return distances_from(g, s, EdgeMask(g.m()));
}

inline std::vector<char> reachable_from(const ColoredGraph& g, Vertex s, const EdgeMask& live) {
  std::vector<char> seen(static_cast<std::size_t>(g.n()), 0);
  std::vector<Vertex> stack{s};
  seen[static_cast<std::size_t>(s)] = 1;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (const Arc& a : g.out_arcs(u)) {
      if (live(a.edge) && seen[static_cast<std::size_t>(a.to)] == 0) {
        seen[static_cast<std::size_t>(a.to)] = 1;
        stack.push_back(a.to);
      }
    }
  }
  return seen;
}

// Distances to t (over reversed arcs when directed).
inline std::vector<std::int64_t> distances_to(const ColoredGraph& g, Vertex t, const EdgeMask& live) {
  if (!g.directed()) return distances_from(g, t, live);
  return distances_from(g.reversed(), t, live);
}

// Length of the shortest walk that starts by traversing e and ends at t.
inline std::int64_t edge_distance(const ColoredGraph& g, EdgeId e, Vertex t, const EdgeMask& live) {
  if (!live(e)) return kInf;
  const Edge& ed = g.edge(e);
  std::int64_t best = kInf;
  auto consider = [&](Vertex far) {
    const auto d = distances_from(g, far, live)[static_cast<std::size_t>(t)];
    if (d != kInf) best = std::min(best, d + g.scaled_weight(e));
  };
  if (g.directed()) {
    // The walk leaves the tail, so only the head is a valid far end.
    consider(ed.head);
  } else {
    consider(ed.head);
    consider(ed.tail);
  }
  return best;
}

// min(cap, maximum number of edge-disjoint s-t paths) by unit-capacity
// augmenting paths. s == t returns cap.
inline int max_disjoint_paths(const ColoredGraph& g, Vertex s, Vertex t, int cap, const EdgeMask& live) {
  if (s == t) return cap;
  struct ResArc {
    Vertex to;
    int cap;
    std::size_t rev;
  };
  std::vector<std::vector<ResArc>> adj(static_cast<std::size_t>(g.n()));
  auto add = [&](Vertex a, Vertex b, int c_ab, int c_ba) {
    auto& A = adj[static_cast<std::size_t>(a)];
    auto& B = adj[static_cast<std::size_t>(b)];
    A.push_back({b, c_ab, B.size()});
    B.push_back({a, c_ba, A.size() - 1});
  };
  for (const auto& e : g.edges()) {
    if (!live(e.id) || e.tail == e.head) continue;
    if (g.directed()) {
      add(e.tail, e.head, 1, 0);
    } else {
      add(e.tail, e.head, 1, 1);
    }
  }
  int flow = 0;
  while (flow < cap) {
    std::vector<std::pair<Vertex, std::size_t>> from(static_cast<std::size_t>(g.n()), {-1, 0});
    std::deque<Vertex> q{s};
    from[static_cast<std::size_t>(s)] = {s, 0};
    while (!q.empty() && from[static_cast<std::size_t>(t)].first == -1) {
      const Vertex u = q.front();
      q.pop_front();
      const auto& arcs = adj[static_cast<std::size_t>(u)];
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (arcs[i].cap > 0 && from[static_cast<std::size_t>(arcs[i].to)].first == -1) {
          from[static_cast<std::size_t>(arcs[i].to)] = {u, i};
          q.push_back(arcs[i].to);
        }
      }
    }
    if (from[static_cast<std::size_t>(t)].first == -1) break;
    for (Vertex v = t; v != s;) {
      auto [u, i] = from[static_cast<std::size_t>(v)];
      auto& arc = adj[static_cast<std::size_t>(u)][i];
      arc.cap -= 1;
      adj[static_cast<std::size_t>(v)][arc.rev].cap += 1;
      v = u;
    }
    ++flow;
  }
  return flow;
}

}  // namespace cftg::oracle
