#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cftg/graph.hpp"

// Seeded generators for test and benchmark inputs.
namespace cftg::random_graphs {

using Rng = std::mt19937_64;

inline Vertex uniform_vertex(Vertex n, Rng& rng) {
  return std::uniform_int_distribution<Vertex>(0, n - 1)(rng);
}

// Random spanning tree (each vertex attaches to an earlier one) plus `extra`
// further edges. Directed graphs orient tree edges away from vertex 0 so every
// vertex is reachable from it; extra arcs are oriented at random.
inline GraphBuilder connected(Vertex n, std::size_t extra, bool directed, Rng& rng) {
  GraphBuilder b(n, directed);
  std::set<std::pair<Vertex, Vertex>> used;
  auto key = [&](Vertex a, Vertex c) { return directed ? std::pair{a, c} : std::pair{std::min(a, c), std::max(a, c)}; };
  for (Vertex v = 1; v < n; ++v) {
    const Vertex p = std::uniform_int_distribution<Vertex>(0, v - 1)(rng);
    b.add_edge(p, v);
    used.insert(key(p, v));
  }
  const std::size_t max_pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / (directed ? 1 : 2);
  extra = std::min(extra, max_pairs - used.size());
  while (extra > 0) {
    const Vertex a = uniform_vertex(n, rng);
    const Vertex c = uniform_vertex(n, rng);
    if (a == c || !used.insert(key(a, c)).second) continue;
    b.add_edge(a, c);
    --extra;
  }
  return b;
}

// Cycle 0..n-1 with `chords` random chords: long shortest paths.
inline GraphBuilder cycle_with_chords(Vertex n, std::size_t chords, bool directed, Rng& rng) {
  GraphBuilder b(n, directed);
  std::set<std::pair<Vertex, Vertex>> used;
  for (Vertex v = 0; v < n; ++v) {
    b.add_edge(v, (v + 1) % n);
    used.insert({std::min(v, (v + 1) % n), std::max(v, (v + 1) % n)});
  }
  for (std::size_t tries = 0; chords > 0 && tries < 100 * (chords + 1); ++tries) {
    const Vertex a = uniform_vertex(n, rng);
    const Vertex c = uniform_vertex(n, rng);
    if (a == c || !used.insert({std::min(a, c), std::max(a, c)}).second) continue;
    b.add_edge(a, c);
    --chords;
  }
  return b;
}

inline GraphBuilder grid(Vertex rows, Vertex cols, bool directed = false) {
  GraphBuilder b(rows * cols, directed);
  for (Vertex r = 0; r < rows; ++r) {
    for (Vertex c = 0; c < cols; ++c) {
      const Vertex v = r * cols + c;
      if (c + 1 < cols) b.add_edge(v, v + 1);
      if (r + 1 < rows) b.add_edge(v, v + cols);
    }
  }
  return b;
}

// Partitions the edges into color classes of random size 1..delta; a
// fraction of edges is left uncolored.
inline void color_randomly(GraphBuilder& b, std::size_t delta, double uncolored_fraction, Rng& rng) {
  std::vector<EdgeId> ids(b.edge_count());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<EdgeId>(i);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::bernoulli_distribution bare(uncolored_fraction);
  std::vector<EdgeId> colored;
  for (EdgeId e : ids) {
    if (delta == 0 || bare(rng)) {
      b.set_color(e, kNoColor);
    } else {
      colored.push_back(e);
    }
  }
  std::size_t i = 0;
  while (i < colored.size()) {
    const auto k = std::uniform_int_distribution<std::size_t>(1, delta)(rng);
    const ColorId c = b.fresh_color();
    for (std::size_t j = 0; j < k && i < colored.size(); ++j, ++i) b.set_color(colored[i], c);
  }
}

inline void weigh_randomly(GraphBuilder& b, std::int64_t max_weight, Rng& rng) {
  std::uniform_int_distribution<std::int64_t> w(1, max_weight);
  for (std::size_t e = 0; e < b.edge_count(); ++e) b.set_weight(static_cast<EdgeId>(e), Weight(w(rng)));
}

// Distinct random sources.
inline std::vector<Vertex> sample_sources(Vertex n, std::size_t k, Rng& rng) {
  std::vector<Vertex> all(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min<std::size_t>(k, all.size()));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace cftg::random_graphs
