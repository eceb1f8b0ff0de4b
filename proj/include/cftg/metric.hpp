#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cftg/error.hpp"
#include "cftg/graph.hpp"

namespace cftg {

// Lexicographic (scaled weight, tiebreak sum) key of a path. Ordering by this
// key is exactly ordering by the perturbed weight w'_e = w_e + r_e * delta for
// any delta below the bound documented on TieBrokenMetric.
struct PathKey {
  std::int64_t weight = 0;
  std::uint64_t tiebreak = 0;

  friend auto operator<=>(const PathKey&, const PathKey&) = default;
  friend PathKey operator+(PathKey a, PathKey b) { return {a.weight + b.weight, a.tiebreak + b.tiebreak}; }
};

inline constexpr PathKey kUnreachableKey{std::numeric_limits<std::int64_t>::max(),
                                         std::numeric_limits<std::uint64_t>::max()};

// Seeded weight perturbation: r_e = R_e / 2^40 with R_e uniform in [0, 2^40).
// The perturbation scale is delta = 1 / (2 n (m + 1) * weight_scale), which is
// below gap / (m + 1) for the minimum gap 1 / weight_scale between distinct
// path weights, so a strict inequality of original weights is never flipped.
class TieBrokenMetric {
 public:
  static constexpr int kTiebreakBits = 40;

  TieBrokenMetric() = default;
  TieBrokenMetric(const ColoredGraph& g, std::uint64_t seed) : seed_(seed) { draw(g); }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] EdgeId m() const noexcept { return static_cast<EdgeId>(r_.size()); }
  [[nodiscard]] bool uniqueness_verified() const noexcept { return verified_; }
  void mark_verified() noexcept { verified_ = true; }

  [[nodiscard]] std::uint64_t tiebreak(EdgeId e) const { return r_.at(static_cast<std::size_t>(e)); }

  [[nodiscard]] PathKey key(const ColoredGraph& g, EdgeId e) const {
    return {g.scaled_weight(e), r_[static_cast<std::size_t>(e)]};
  }

  // Same graph, next seed in a deterministic chain.
  [[nodiscard]] TieBrokenMetric reseeded(const ColoredGraph& g) const {
    return TieBrokenMetric(g, splitmix(seed_));
  }

  using Rational = boost::multiprecision::cpp_rational;

  [[nodiscard]] static Rational delta(const ColoredGraph& g) {
    return Rational(1) / (Rational(2) * std::max<Vertex>(1, g.n()) * (g.m() + 1) * g.weight_scale());
  }

  // Exact w'_e.
  [[nodiscard]] Rational perturbed_weight(const ColoredGraph& g, EdgeId e) const {
    const auto& w = g.edge(e).weight;
    Rational r(boost::multiprecision::cpp_int(tiebreak(e)),
               boost::multiprecision::cpp_int(1) << kTiebreakBits);
    return Rational(w.numerator()) / Rational(w.denominator()) + r * delta(g);
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  void draw(const ColoredGraph& g) {
    std::mt19937_64 rng(seed_);
    r_.resize(static_cast<std::size_t>(g.m()));
    for (auto& r : r_) r = rng() >> (64 - kTiebreakBits);
  }

  std::uint64_t seed_ = 0;
  bool verified_ = false;
  std::vector<std::uint64_t> r_;
};

// A path as an ordered edge list from source to target.
struct Path {
  Vertex source = 0;
  Vertex target = 0;
  bool reachable = false;
  std::vector<EdgeId> edges;
  std::vector<Vertex> vertices;  // edges.size() + 1 entries when reachable
  std::int64_t scaled_weight = 0;

  [[nodiscard]] std::size_t length() const noexcept { return edges.size(); }
  [[nodiscard]] bool empty() const noexcept { return edges.empty(); }

  // The last `len` edges (all of them when the path is shorter).
  [[nodiscard]] std::span<const EdgeId> suffix(std::size_t len) const {
    const auto k = std::min(len, edges.size());
    return std::span<const EdgeId>(edges).subspan(edges.size() - k, k);
  }
  [[nodiscard]] std::span<const Vertex> suffix_vertices(std::size_t len) const {
    if (!reachable) return {};
    const auto k = std::min(len, edges.size());
    return std::span<const Vertex>(vertices).subspan(vertices.size() - k - 1, k + 1);
  }

  friend bool operator==(const Path& a, const Path& b) {
    return a.source == b.source && a.target == b.target && a.reachable == b.reachable && a.edges == b.edges;
  }
};

// Single-source shortest paths under a TieBrokenMetric over the live edges of
// a graph. Ties between distinct predecessors are recorded; any query whose
// path passes through a tied vertex throws UniquenessViolation.
class ShortestPathTree {
 public:
  ShortestPathTree(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex source, const EdgeMask* live = nullptr)
      : g_(&g), source_(source) {
    if (source < 0 || source >= g.n()) throw InvalidArgument("source vertex out of range");
    const auto n = static_cast<std::size_t>(g.n());
    key_.assign(n, kUnreachableKey);
    parent_.assign(n, kNoEdge);
    hops_.assign(n, -1);
    tied_.assign(n, 0);
    tainted_.assign(n, 0);

    using Item = std::pair<PathKey, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    key_[static_cast<std::size_t>(source)] = PathKey{};
    hops_[static_cast<std::size_t>(source)] = 0;
    pq.emplace(PathKey{}, source);
    std::vector<char> done(n, 0);
    while (!pq.empty()) {
      auto [k, u] = pq.top();
      pq.pop();
      const auto ui = static_cast<std::size_t>(u);
      if (done[ui] != 0 || k != key_[ui]) continue;
      done[ui] = 1;
      if (u != source) {
        const Vertex p = parent_vertex(u);
        tainted_[ui] = static_cast<char>(tied_[ui] != 0 || tainted_[static_cast<std::size_t>(p)] != 0);
        hops_[ui] = hops_[static_cast<std::size_t>(p)] + 1;
      }
      for (const Arc& a : g.out_arcs(u)) {
        if (live != nullptr && !(*live)(a.edge)) continue;
        const auto vi = static_cast<std::size_t>(a.to);
        if (done[vi] != 0) continue;
        const PathKey cand = k + metric.key(g, a.edge);
        if (cand < key_[vi]) {
          key_[vi] = cand;
          parent_[vi] = a.edge;
          tied_[vi] = 0;
          pq.emplace(cand, a.to);
        } else if (cand == key_[vi] && parent_[vi] != a.edge) {
          tied_[vi] = 1;
        }
      }
    }
  }

  [[nodiscard]] const ColoredGraph& graph() const noexcept { return *g_; }
  [[nodiscard]] Vertex source() const noexcept { return source_; }
  [[nodiscard]] bool reached(Vertex v) const { return key_.at(static_cast<std::size_t>(v)) != kUnreachableKey; }
  [[nodiscard]] PathKey key(Vertex v) const { return key_.at(static_cast<std::size_t>(v)); }
  // Scaled weighted distance, or nullopt when unreachable.
  [[nodiscard]] std::optional<std::int64_t> distance(Vertex v) const {
    if (!reached(v)) return std::nullopt;
    return key_[static_cast<std::size_t>(v)].weight;
  }
  // Edge count of the canonical path, -1 when unreachable.
  [[nodiscard]] int hops(Vertex v) const { return hops_.at(static_cast<std::size_t>(v)); }
  [[nodiscard]] EdgeId parent_edge(Vertex v) const { return parent_.at(static_cast<std::size_t>(v)); }
  [[nodiscard]] Vertex parent_vertex(Vertex v) const {
    const EdgeId e = parent_edge(v);
    return e == kNoEdge ? v : g_->edge(e).other(v);
  }
  // True when the path to v is not unique under the metric.
  [[nodiscard]] bool ambiguous(Vertex v) const { return tainted_.at(static_cast<std::size_t>(v)) != 0; }
  [[nodiscard]] bool any_ambiguous() const {
    return std::any_of(tainted_.begin(), tainted_.end(), [](char c) { return c != 0; });
  }

  void require_unique(Vertex v) const {
    if (ambiguous(v)) {
      throw UniquenessViolation("tied shortest paths from " + std::to_string(source_) + " to " + std::to_string(v));
    }
  }

  // LastE(source, v); nullopt when v is unreachable or v == source.
  [[nodiscard]] std::optional<EdgeId> last_edge(Vertex v) const {
    if (!reached(v) || v == source_) return std::nullopt;
    require_unique(v);
    return parent_edge(v);
  }

  // Up to `len` trailing edges of the path to v, listed from v backwards.
  [[nodiscard]] std::vector<EdgeId> suffix_edges(Vertex v, std::size_t len) const {
    std::vector<EdgeId> out;
    if (!reached(v)) return out;
    require_unique(v);
    Vertex x = v;
    while (x != source_ && out.size() < len) {
      out.push_back(parent_edge(x));
      x = parent_vertex(x);
    }
    return out;
  }

  // Vertices of the `len`-suffix of the path to v, from v backwards.
  [[nodiscard]] std::vector<Vertex> suffix_vertices(Vertex v, std::size_t len) const {
    std::vector<Vertex> out;
    if (!reached(v)) return out;
    require_unique(v);
    Vertex x = v;
    out.push_back(x);
    while (x != source_ && out.size() <= len) {
      x = parent_vertex(x);
      out.push_back(x);
    }
    return out;
  }

  [[nodiscard]] Path path_to(Vertex v) const {
    Path p;
    p.source = source_;
    p.target = v;
    if (!reached(v)) return p;
    require_unique(v);
    p.reachable = true;
    p.scaled_weight = key_[static_cast<std::size_t>(v)].weight;
    Vertex x = v;
    p.vertices.push_back(x);
    while (x != source_) {
      p.edges.push_back(parent_edge(x));
      x = parent_vertex(x);
      p.vertices.push_back(x);
    }
    std::reverse(p.edges.begin(), p.edges.end());
    std::reverse(p.vertices.begin(), p.vertices.end());
    return p;
  }

  // Every parent edge of a reached vertex: the shortest-path tree itself.
  [[nodiscard]] std::vector<EdgeId> tree_edges() const {
    std::vector<EdgeId> out;
    for (Vertex v = 0; v < g_->n(); ++v) {
      if (v != source_ && reached(v)) {
        require_unique(v);
        out.push_back(parent_edge(v));
      }
    }
    return out;
  }

 private:
  const ColoredGraph* g_;
  Vertex source_;
  std::vector<PathKey> key_;
  std::vector<EdgeId> parent_;
  std::vector<int> hops_;
  std::vector<char> tied_;
  std::vector<char> tainted_;
};

// pi_G(u, v | F) under the metric.
inline Path shortest_path(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex u, Vertex v,
                          const FaultSet& faults = {}) {
  if (v < 0 || v >= g.n()) throw InvalidArgument("target vertex out of range");
  const EdgeMask live = apply_fault(g, faults);
  return ShortestPathTree(g, metric, u, &live).path_to(v);
}

// LastE_G(u, v | F).
inline std::optional<EdgeId> last_edge(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex u, Vertex v,
                                       const FaultSet& faults = {}) {
  if (v < 0 || v >= g.n()) throw InvalidArgument("target vertex out of range");
  const EdgeMask live = apply_fault(g, faults);
  return ShortestPathTree(g, metric, u, &live).last_edge(v);
}

// dist_G(e, t | F): weight of e plus the distance from its far end to t,
// minimized over the directions e may be traversed. nullopt if unreachable.
inline std::optional<std::int64_t> edge_distance_to(const ColoredGraph& g, const TieBrokenMetric& metric, EdgeId e,
                                                    Vertex t, const EdgeMask& live) {
  if (!live(e)) return std::nullopt;
  const Edge& ed = g.edge(e);
  std::optional<std::int64_t> best;
  auto consider = [&](Vertex far) {
    const auto d = ShortestPathTree(g, metric, far, &live).distance(t);
    if (d && (!best || *d + g.scaled_weight(e) < *best)) best = *d + g.scaled_weight(e);
  };
  consider(ed.head);
  if (!g.directed()) consider(ed.tail);
  return best;
}

// Fault-free all-pairs uniqueness check, reseeding on any tie.
inline TieBrokenMetric perturb_weights(const ColoredGraph& g, std::uint64_t seed, int max_attempts = 8) {
  TieBrokenMetric metric(g, seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    bool unique = true;
    for (Vertex s = 0; s < g.n() && unique; ++s) {
      unique = !ShortestPathTree(g, metric, s).any_ambiguous();
    }
    if (unique) {
      metric.mark_verified();
      return metric;
    }
    metric = metric.reseeded(g);
  }
  throw RetryExhausted("no tie-free perturbation found in " + std::to_string(max_attempts) + " attempts");
}

// Runs fn(metric), reseeding and retrying whenever it reports a tie.
template <typename Fn>
auto with_reseeding(const ColoredGraph& g, TieBrokenMetric metric, Fn&& fn, int max_attempts = 8) {
  for (int attempt = 1;; ++attempt) {
    try {
      return fn(metric);
    } catch (const UniquenessViolation&) {
      if (attempt >= max_attempts) throw;
      metric = metric.reseeded(g);
    }
  }
}

}  // namespace cftg
