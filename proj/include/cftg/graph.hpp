#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "cftg/error.hpp"

namespace cftg {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;
using ColorId = std::int32_t;
using Weight = boost::rational<std::int64_t>;

inline constexpr ColorId kNoColor = -1;
inline constexpr EdgeId kNoEdge = -1;

struct Edge {
  EdgeId id = kNoEdge;
  Vertex tail = 0;
  Vertex head = 0;
  Weight weight{1};
  ColorId color = kNoColor;

  // Endpoint opposite to v (the head when v is the tail, and vice versa).
  [[nodiscard]] Vertex other(Vertex v) const noexcept { return v == tail ? head : tail; }
};

// One traversable direction of an edge. Undirected edges yield two arcs.
struct Arc {
  EdgeId edge;
  Vertex to;
};

class GraphBuilder;

// Immutable edge-colored graph. Edge ids are dense 0..m-1; colors are dense
// ids with names. Edges of color kNoColor never fail under color faults.
class ColoredGraph {
 public:
  ColoredGraph() = default;

  [[nodiscard]] Vertex n() const noexcept { return n_; }
  [[nodiscard]] EdgeId m() const noexcept { return static_cast<EdgeId>(edges_.size()); }
  [[nodiscard]] bool directed() const noexcept { return directed_; }
  // True when every edge has weight exactly 1.
  [[nodiscard]] bool unit_weight() const noexcept { return unit_weight_; }

  [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }
  [[nodiscard]] const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }

  [[nodiscard]] std::span<const Arc> out_arcs(Vertex v) const {
    const auto b = arc_offset_[static_cast<std::size_t>(v)];
    const auto e = arc_offset_[static_cast<std::size_t>(v) + 1];
    return std::span<const Arc>(arcs_).subspan(b, e - b);
  }

  [[nodiscard]] ColorId color_count() const noexcept {
    return static_cast<ColorId>(color_names_.size());
  }
  [[nodiscard]] const std::string& color_name(ColorId c) const {
    return color_names_.at(static_cast<std::size_t>(c));
  }
  [[nodiscard]] std::optional<ColorId> find_color(std::string_view name) const {
    auto it = color_by_name_.find(std::string(name));
    if (it == color_by_name_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] std::span<const EdgeId> color_class(ColorId c) const {
    return color_index_.at(static_cast<std::size_t>(c));
  }
  // Colors that label at least one edge, ascending.
  [[nodiscard]] std::vector<ColorId> used_colors() const {
    std::vector<ColorId> out;
    for (ColorId c = 0; c < color_count(); ++c) {
      if (!color_index_[static_cast<std::size_t>(c)].empty()) out.push_back(c);
    }
    return out;
  }
  // Maximum color class size.
  [[nodiscard]] std::size_t delta() const noexcept { return delta_; }

  // Weights times weight_scale() are integers; all distance arithmetic runs
  // on these scaled integers.
  [[nodiscard]] std::int64_t weight_scale() const noexcept { return scale_; }
  [[nodiscard]] std::int64_t scaled_weight(EdgeId e) const {
    return scaled_weights_[static_cast<std::size_t>(e)];
  }
  [[nodiscard]] Weight unscale(std::int64_t scaled) const { return Weight(scaled, scale_); }

  // Same ids, colors and weights with every edge direction flipped.
  [[nodiscard]] ColoredGraph reversed() const;

 private:
  friend class GraphBuilder;
  void finalize();

  Vertex n_ = 0;
  bool directed_ = false;
  bool unit_weight_ = true;
  std::vector<Edge> edges_;
  std::vector<std::string> color_names_;
  std::map<std::string, ColorId, std::less<>> color_by_name_;
  std::vector<std::vector<EdgeId>> color_index_;
  std::size_t delta_ = 0;
  std::int64_t scale_ = 1;
  std::vector<std::int64_t> scaled_weights_;
  std::vector<std::size_t> arc_offset_;
  std::vector<Arc> arcs_;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(Vertex n = 0, bool directed = false) : n_(n), directed_(directed) {
    if (n < 0) throw InvalidArgument("negative vertex count");
  }

  Vertex add_vertex() { return n_++; }
  Vertex add_vertices(Vertex k) {
    const Vertex first = n_;
    n_ += k;
    return first;
  }
  [[nodiscard]] Vertex vertex_count() const noexcept { return n_; }
  [[nodiscard]] bool directed() const noexcept { return directed_; }

  // Id of the color with this name, registering it on first use.
  ColorId color(std::string_view name) {
    if (name.empty() || name == "-") throw InvalidArgument("invalid color name");
    if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
    const auto id = static_cast<ColorId>(names_.size());
    names_.emplace_back(name);
    by_name_.emplace(std::string(name), id);
    return id;
  }

  // A new color guaranteed distinct from every color registered so far.
  ColorId fresh_color() {
    std::string name;
    do {
      name = "c" + std::to_string(fresh_counter_++);
    } while (by_name_.count(name) != 0);
    return color(name);
  }

  [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
  [[nodiscard]] const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }
  void set_color(EdgeId e, ColorId c) { edges_.at(static_cast<std::size_t>(e)).color = c; }
  void set_weight(EdgeId e, Weight w) { edges_.at(static_cast<std::size_t>(e)).weight = w; }

  EdgeId add_edge(Vertex tail, Vertex head, Weight weight = Weight(1), ColorId color = kNoColor) {
    const auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back(Edge{id, tail, head, weight, color});
    return id;
  }

  // Validates every invariant and freezes the graph.
  [[nodiscard]] ColoredGraph build() const {
    ColoredGraph g;
    g.n_ = n_;
    g.directed_ = directed_;
    for (const auto& e : edges_) {
      if (e.tail < 0 || e.tail >= n_ || e.head < 0 || e.head >= n_) {
        throw InvalidArgument("edge " + std::to_string(e.id) + ": endpoint out of range [0, " +
                              std::to_string(n_) + ")");
      }
      if (e.weight <= Weight(0)) {
        throw InvalidArgument("edge " + std::to_string(e.id) + ": weight must be positive");
      }
      if (e.color != kNoColor &&
          (e.color < 0 || e.color >= static_cast<ColorId>(names_.size()))) {
        throw InvalidArgument("edge " + std::to_string(e.id) + ": unknown color id");
      }
    }
    g.edges_ = edges_;
    g.color_names_ = names_;
    for (const auto& [name, id] : by_name_) g.color_by_name_.emplace(name, id);
    g.finalize();
    return g;
  }

 private:
  Vertex n_;
  bool directed_;
  std::vector<Edge> edges_;
  std::vector<std::string> names_;
  std::map<std::string, ColorId, std::less<>> by_name_;
  std::size_t fresh_counter_ = 0;
};

inline void ColoredGraph::finalize() {
  color_index_.assign(color_names_.size(), {});
  unit_weight_ = true;
  std::int64_t scale = 1;
  for (const auto& e : edges_) {
    if (e.color != kNoColor) color_index_[static_cast<std::size_t>(e.color)].push_back(e.id);
    if (e.weight != Weight(1)) unit_weight_ = false;
    const auto den = e.weight.denominator();
    const std::int64_t g = std::gcd(scale, den);
    const __int128 l = static_cast<__int128>(scale / g) * den;
    if (l > std::numeric_limits<std::int64_t>::max() / 4) {
      throw InvalidArgument("weight denominators too large to share a common scale");
    }
    scale = static_cast<std::int64_t>(l);
  }
  scale_ = scale;
  delta_ = 0;
  for (const auto& cls : color_index_) delta_ = std::max(delta_, cls.size());

  // Every path sum must fit comfortably in 62 bits.
  scaled_weights_.clear();
  scaled_weights_.reserve(edges_.size());
  const __int128 budget = static_cast<__int128>(1) << 61;
  for (const auto& e : edges_) {
    const __int128 w = static_cast<__int128>(e.weight.numerator()) * (scale / e.weight.denominator());
    if (w * std::max<__int128>(1, n_) >= budget) {
      throw InvalidArgument("edge " + std::to_string(e.id) + ": scaled weight overflows");
    }
    scaled_weights_.push_back(static_cast<std::int64_t>(w));
  }

  arc_offset_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (const auto& e : edges_) {
    ++arc_offset_[static_cast<std::size_t>(e.tail) + 1];
    if (!directed_ && e.head != e.tail) ++arc_offset_[static_cast<std::size_t>(e.head) + 1];
  }
  for (std::size_t v = 0; v < static_cast<std::size_t>(n_); ++v) arc_offset_[v + 1] += arc_offset_[v];
  arcs_.assign(arc_offset_.back(), Arc{kNoEdge, 0});
  auto cursor = arc_offset_;
  for (const auto& e : edges_) {
    arcs_[cursor[static_cast<std::size_t>(e.tail)]++] = Arc{e.id, e.head};
    if (!directed_ && e.head != e.tail) arcs_[cursor[static_cast<std::size_t>(e.head)]++] = Arc{e.id, e.tail};
  }
}

inline ColoredGraph ColoredGraph::reversed() const {
  ColoredGraph r = *this;
  for (auto& e : r.edges_) std::swap(e.tail, e.head);
  r.finalize();
  return r;
}

enum class FaultMode { Color, Edge };

// A set of failing colors or edges, kept sorted and duplicate-free.
class FaultSet {
 public:
  FaultSet() = default;
  FaultSet(FaultMode mode, std::vector<std::int32_t> members) : mode_(mode), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  static FaultSet colors(std::vector<ColorId> cs) { return FaultSet(FaultMode::Color, std::move(cs)); }
  static FaultSet edges(std::vector<EdgeId> es) { return FaultSet(FaultMode::Edge, std::move(es)); }

  [[nodiscard]] FaultMode mode() const noexcept { return mode_; }
  [[nodiscard]] const std::vector<std::int32_t>& members() const noexcept { return members_; }
  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] bool empty() const noexcept { return members_.empty(); }
  [[nodiscard]] bool contains(std::int32_t x) const {
    return std::binary_search(members_.begin(), members_.end(), x);
  }
  [[nodiscard]] bool within_budget(std::size_t f) const noexcept { return members_.size() <= f; }

  friend bool operator==(const FaultSet&, const FaultSet&) = default;
  friend auto operator<=>(const FaultSet& a, const FaultSet& b) {
    if (auto c = a.mode_ <=> b.mode_; c != 0) return c;
    return a.members_ <=> b.members_;
  }

 private:
  FaultMode mode_ = FaultMode::Edge;
  std::vector<std::int32_t> members_;
};

// Per-edge liveness flags over a parent graph.
class EdgeMask {
 public:
  EdgeMask() = default;
  explicit EdgeMask(EdgeId m, bool alive = true) : alive_(static_cast<std::size_t>(m), alive ? 1 : 0) {}

  [[nodiscard]] bool operator()(EdgeId e) const { return alive_[static_cast<std::size_t>(e)] != 0; }
  void kill(EdgeId e) { alive_[static_cast<std::size_t>(e)] = 0; }
  void revive(EdgeId e) { alive_[static_cast<std::size_t>(e)] = 1; }
  [[nodiscard]] EdgeId size() const noexcept { return static_cast<EdgeId>(alive_.size()); }
  [[nodiscard]] std::size_t live_count() const {
    return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), 1));
  }
  friend bool operator==(const EdgeMask&, const EdgeMask&) = default;

 private:
  std::vector<char> alive_;
};

// Edges of color in F (COLOR mode) or with id in F (EDGE mode) are removed
// from `base`. Colors or edge ids outside the graph are ignored.
inline EdgeMask apply_fault(const ColoredGraph& g, const FaultSet& f, EdgeMask base) {
  if (f.mode() == FaultMode::Color) {
    for (ColorId c : f.members()) {
      if (c < 0 || c >= g.color_count()) continue;
      for (EdgeId e : g.color_class(c)) base.kill(e);
    }
  } else {
    for (EdgeId e : f.members()) {
      if (e >= 0 && e < g.m()) base.kill(e);
    }
  }
  return base;
}

inline EdgeMask apply_fault(const ColoredGraph& g, const FaultSet& f) {
  return apply_fault(g, f, EdgeMask(g.m()));
}

// The edges a fault set removes, as an EDGE-mode fault set.
inline FaultSet to_edge_faults(const ColoredGraph& g, const FaultSet& f) {
  if (f.mode() == FaultMode::Edge) return f;
  std::vector<EdgeId> out;
  for (ColorId c : f.members()) {
    if (c < 0 || c >= g.color_count()) continue;
    const auto cls = g.color_class(c);
    out.insert(out.end(), cls.begin(), cls.end());
  }
  return FaultSet::edges(std::move(out));
}

// Edge subset of a parent graph. The parent must outlive the subgraph.
class Subgraph {
 public:
  explicit Subgraph(const ColoredGraph& parent) : parent_(&parent), member_(static_cast<std::size_t>(parent.m()), 0) {}

  Subgraph(const ColoredGraph& parent, std::span<const EdgeId> ids) : Subgraph(parent) {
    for (EdgeId e : ids) insert(e);
  }

  [[nodiscard]] const ColoredGraph& parent() const noexcept { return *parent_; }

  // Returns true when e was not yet present.
  bool insert(EdgeId e) {
    if (e < 0 || e >= parent_->m()) throw InvalidArgument("edge id " + std::to_string(e) + " not in parent");
    auto& slot = member_[static_cast<std::size_t>(e)];
    if (slot != 0) return false;
    slot = 1;
    ++count_;
    return true;
  }
  void insert_all(std::span<const EdgeId> es) {
    for (EdgeId e : es) insert(e);
  }
  void merge(const Subgraph& other) {
    for (EdgeId e = 0; e < other.parent().m(); ++e) {
      if (other.contains(e)) insert(e);
    }
  }

  [[nodiscard]] bool contains(EdgeId e) const { return member_.at(static_cast<std::size_t>(e)) != 0; }
  [[nodiscard]] std::size_t size() const noexcept { return count_; }

  [[nodiscard]] std::vector<EdgeId> edge_ids() const {
    std::vector<EdgeId> out;
    out.reserve(count_);
    for (EdgeId e = 0; e < parent_->m(); ++e) {
      if (member_[static_cast<std::size_t>(e)] != 0) out.push_back(e);
    }
    return out;
  }

  // Liveness mask of H viewed inside its parent.
  [[nodiscard]] EdgeMask mask() const {
    EdgeMask m(parent_->m(), false);
    for (EdgeId e = 0; e < parent_->m(); ++e) {
      if (member_[static_cast<std::size_t>(e)] != 0) m.revive(e);
    }
    return m;
  }

  [[nodiscard]] bool includes(const Subgraph& other) const {
    for (EdgeId e = 0; e < parent_->m(); ++e) {
      if (other.contains(e) && !contains(e)) return false;
    }
    return true;
  }

  friend bool operator==(const Subgraph& a, const Subgraph& b) { return a.member_ == b.member_; }

 private:
  const ColoredGraph* parent_;
  std::vector<char> member_;
  std::size_t count_ = 0;
};

}  // namespace cftg
