#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cftg/derived.hpp"
#include "cftg/error.hpp"
#include "cftg/graph.hpp"
#include "cftg/io.hpp"
#include "cftg/oracle.hpp"

namespace cftg {

enum class TreeFamily { DeltaQ, Binary };

struct ColoredTreeInstance {
  ColoredGraph graph;
  Vertex root = 0;
  std::vector<Vertex> leaves;
  std::map<Vertex, ColorId> leaf_color;  // c_v
  TreeFamily family = TreeFamily::DeltaQ;
  std::size_t delta = 0;
  std::size_t q = 0;  // 0 for the binary family

  // Closed forms.
  std::size_t expected_leaves = 0;
  std::size_t expected_edges = 0;
  std::size_t min_depth = 0;  // d(delta, q); 0 for the binary family
  std::size_t max_depth = 0;  // D(delta, q)
};

inline std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

namespace lb_detail {

struct TreeParts {
  Vertex root;
  std::vector<Vertex> leaves;
  std::vector<ColorId> leaf_colors;  // parallel to leaves
};

// Path of `len` edges from `from` ending at `to` (which must already exist),
// or from `from` to fresh vertices when `to` is empty; returns the end.
inline Vertex add_path(GraphBuilder& b, Vertex from, std::size_t len, std::optional<Vertex> to,
                       const std::vector<ColorId>& colors = {}) {
  Vertex cur = from;
  for (std::size_t k = 0; k < len; ++k) {
    const bool last = k + 1 == len;
    const Vertex next = last && to ? *to : b.add_vertex();
    b.add_edge(cur, next, Weight(1), k < colors.size() ? colors[k] : kNoColor);
    cur = next;
  }
  return cur;
}

inline TreeParts build_tdq(GraphBuilder& b, std::size_t delta, std::size_t q) {
  if (delta == 0) {
    const Vertex v = b.add_vertex();
    return {v, {v}, {b.fresh_color()}};
  }
  const std::size_t sub = ipow(q, delta - 1);
  std::vector<TreeParts> parts;
  for (std::size_t i = 0; i < q; ++i) parts.push_back(build_tdq(b, delta - 1, q));
  // Q_i hangs T_i: |Q_i| = 2 (q - i) q^(delta - 1), i = 1..q.
  std::vector<Vertex> u(q);
  for (std::size_t i = 1; i <= q; ++i) {
    const std::size_t len = 2 * (q - i) * sub;
    if (len == 0) {
      u[i - 1] = parts[i - 1].root;
    } else {
      u[i - 1] = b.add_vertex();
      add_path(b, u[i - 1], len, parts[i - 1].root);
    }
  }
  // P_i joins u_i to u_{i+1} and carries the colors of T_i's leaves.
  for (std::size_t i = 1; i < q; ++i) add_path(b, u[i - 1], sub, u[i], parts[i - 1].leaf_colors);
  TreeParts out{u[0], {}, {}};
  for (const auto& p : parts) {
    out.leaves.insert(out.leaves.end(), p.leaves.begin(), p.leaves.end());
    out.leaf_colors.insert(out.leaf_colors.end(), p.leaf_colors.begin(), p.leaf_colors.end());
  }
  return out;
}

inline TreeParts build_binary(GraphBuilder& b, std::size_t delta) {
  if (delta == 0) {
    const Vertex v = b.add_vertex();
    return {v, {v}, {b.fresh_color()}};
  }
  TreeParts t0 = build_binary(b, delta - 1);
  TreeParts t1 = build_binary(b, delta - 1);
  const Vertex r = b.add_vertex();
  const std::size_t len = ipow(2, delta - 1);
  // P_i carries the colors of T_{1-i}'s leaves.
  add_path(b, r, len, t0.root, t1.leaf_colors);
  add_path(b, r, len, t1.root, t0.leaf_colors);
  TreeParts out{r, t0.leaves, t0.leaf_colors};
  out.leaves.insert(out.leaves.end(), t1.leaves.begin(), t1.leaves.end());
  out.leaf_colors.insert(out.leaf_colors.end(), t1.leaf_colors.begin(), t1.leaf_colors.end());
  return out;
}

inline ColoredTreeInstance finish_tree(const GraphBuilder& b, const TreeParts& parts) {
  ColoredTreeInstance t;
  t.graph = b.build();
  t.root = parts.root;
  t.leaves = parts.leaves;
  for (std::size_t i = 0; i < parts.leaves.size(); ++i) t.leaf_color[parts.leaves[i]] = parts.leaf_colors[i];
  return t;
}

// Splits every color class into `f` classes round-robin in edge order.
// Returns the new builder and, per old color, its parts.
inline std::pair<GraphBuilder, std::vector<std::vector<ColorId>>> split_colors(const GraphBuilder& b,
                                                                               const ColoredGraph& g, std::size_t f) {
  GraphBuilder out(b.vertex_count(), b.directed());
  std::vector<std::vector<ColorId>> parts(static_cast<std::size_t>(g.color_count()));
  for (ColorId c = 0; c < g.color_count(); ++c) {
    for (std::size_t k = 1; k <= f; ++k) parts[static_cast<std::size_t>(c)].push_back(out.color(g.color_name(c) + "." + std::to_string(k)));
  }
  std::vector<std::size_t> seen(static_cast<std::size_t>(g.color_count()), 0);
  for (const auto& e : g.edges()) {
    ColorId c = kNoColor;
    if (e.color != kNoColor && f > 0) {
      auto& k = seen[static_cast<std::size_t>(e.color)];
      c = parts[static_cast<std::size_t>(e.color)][k % f];
      ++k;
    }
    out.add_edge(e.tail, e.head, e.weight, c);
  }
  return {std::move(out), std::move(parts)};
}

}  // namespace lb_detail

// T(delta, q): q^delta leaves, delta (q^(delta+1) - q^(delta-1)) edges, leaf
// depths in [q^delta - 1, 2 (q^delta - 1)].
inline ColoredTreeInstance build_tree_T_dq(std::size_t delta, std::size_t q) {
  if (q < 2) throw InvalidArgument("T(delta, q) needs q >= 2");
  GraphBuilder b(0, false);
  const auto parts = lb_detail::build_tdq(b, delta, q);
  auto t = lb_detail::finish_tree(b, parts);
  t.family = TreeFamily::DeltaQ;
  t.delta = delta;
  t.q = q;
  t.expected_leaves = ipow(q, delta);
  t.expected_edges = delta == 0 ? 0 : delta * (ipow(q, delta + 1) - ipow(q, delta - 1));
  t.min_depth = ipow(q, delta) - 1;
  t.max_depth = 2 * (ipow(q, delta) - 1);
  return t;
}

// T(delta): 2^delta leaves, delta 2^delta edges.
inline ColoredTreeInstance build_tree_binary(std::size_t delta) {
  GraphBuilder b(0, false);
  const auto parts = lb_detail::build_binary(b, delta);
  auto t = lb_detail::finish_tree(b, parts);
  t.family = TreeFamily::Binary;
  t.delta = delta;
  t.expected_leaves = ipow(2, delta);
  t.expected_edges = delta * ipow(2, delta);
  t.max_depth = delta == 0 ? 0 : ipow(2, delta) - 1;
  return t;
}

enum class PreserverKind { Distance, Reachability, Flow };

struct MandatoryEdge {
  EdgeId edge = kNoEdge;
  FaultSet witness;
};

struct LowerBoundInstance {
  ColoredGraph graph;
  PreserverKind kind = PreserverKind::Distance;
  std::vector<Vertex> sources;
  std::optional<Vertex> target;  // single-pair instances only
  std::size_t budget = 1;        // f
  int lambda = 1;
  std::vector<MandatoryEdge> mandatory;
  std::size_t expected_mandatory = 0;
};

// q = largest integer with q^(delta+1) sigma delta <= n.
inline std::size_t sourcewise_lb_q(std::size_t sigma, std::size_t delta, std::size_t n) {
  if (sigma == 0 || delta == 0) throw InvalidArgument("sourcewise lower bound needs sigma >= 1 and delta >= 1");
  std::size_t q = 1;
  while (ipow(q + 1, delta + 1) * sigma * delta <= n) ++q;
  return q;
}

// sigma color-disjoint copies of T(delta, q) rooted at the sources, all leaves
// X joined to n new vertices Y. Every (x, y) is mandatory with witness {c_x}.
inline LowerBoundInstance build_sourcewise_lb(std::size_t sigma, std::size_t delta, std::size_t n) {
  const std::size_t q = sourcewise_lb_q(sigma, delta, n);
  if (q < 2) throw InvalidArgument("q = " + std::to_string(q) + " < 2; increase n");
  GraphBuilder b(0, false);
  LowerBoundInstance inst;
  std::vector<lb_detail::TreeParts> trees;
  for (std::size_t i = 0; i < sigma; ++i) {
    trees.push_back(lb_detail::build_tdq(b, delta, q));
    inst.sources.push_back(trees.back().root);
  }
  const Vertex y0 = b.add_vertices(static_cast<Vertex>(n));
  std::vector<std::pair<EdgeId, ColorId>> xy;
  for (const auto& t : trees) {
    for (std::size_t k = 0; k < t.leaves.size(); ++k) {
      for (Vertex y = y0; y < y0 + static_cast<Vertex>(n); ++y) xy.emplace_back(b.add_edge(t.leaves[k], y), t.leaf_colors[k]);
    }
  }
  inst.graph = b.build();
  for (auto [e, c] : xy) inst.mandatory.push_back({e, FaultSet::colors({c})});
  inst.kind = PreserverKind::Distance;
  inst.budget = 1;
  inst.expected_mandatory = n * sigma * ipow(q, delta);
  return inst;
}

namespace lb_detail {

inline void check_tree_budget(std::size_t lambda, std::size_t n, std::size_t delta, std::size_t f) {
  const std::size_t fd = f * delta;
  if (fd >= 62 || lambda * fd * ipow(2, fd) > n) {
    throw InvalidArgument("need lambda * f * delta * 2^(f * delta) <= n");
  }
}

// One split copy of T(f delta) directed away from its root, with its leaves
// joined to Y. Appends mandatory (x, y) edges with witness F_x.
inline Vertex add_split_tree(GraphBuilder& out, std::size_t delta, std::size_t f, std::vector<Vertex>& leaves,
                             std::vector<std::vector<ColorId>>& witnesses) {
  GraphBuilder tb(0, true);
  const auto parts = build_binary(tb, f * delta);
  const ColoredGraph tg = tb.build();
  auto [split, color_parts] = split_colors(tb, tg, f);
  const ColoredGraph sg = split.build();
  const Vertex offset = out.add_vertices(sg.n());
  std::map<ColorId, ColorId> remap;
  for (ColorId c = 0; c < sg.color_count(); ++c) remap[c] = out.fresh_color();
  for (const auto& e : sg.edges()) {
    out.add_edge(e.tail + offset, e.head + offset, e.weight, e.color == kNoColor ? kNoColor : remap[e.color]);
  }
  for (std::size_t k = 0; k < parts.leaves.size(); ++k) {
    leaves.push_back(parts.leaves[k] + offset);
    std::vector<ColorId> w;
    for (ColorId c : color_parts[static_cast<std::size_t>(parts.leaf_colors[k])]) w.push_back(remap[c]);
    witnesses.push_back(std::move(w));
  }
  return parts.root + offset;
}

}  // namespace lb_detail

// Split T(f delta) rooted at s, leaves joined by arcs to n new vertices.
inline LowerBoundInstance build_reachability_lb(std::size_t n, std::size_t delta, std::size_t f) {
  lb_detail::check_tree_budget(1, n, delta, f);
  GraphBuilder b(0, true);
  std::vector<Vertex> leaves;
  std::vector<std::vector<ColorId>> witnesses;
  const Vertex s = lb_detail::add_split_tree(b, delta, f, leaves, witnesses);
  const Vertex y0 = b.add_vertices(static_cast<Vertex>(n));
  LowerBoundInstance inst;
  std::vector<std::pair<EdgeId, std::size_t>> xy;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    for (Vertex y = y0; y < y0 + static_cast<Vertex>(n); ++y) xy.emplace_back(b.add_edge(leaves[k], y), k);
  }
  inst.graph = b.build();
  for (auto [e, k] : xy) inst.mandatory.push_back({e, FaultSet::colors(witnesses[k])});
  inst.kind = PreserverKind::Reachability;
  inst.sources = {s};
  inst.budget = f;
  inst.expected_mandatory = ipow(2, f * delta) * n;
  return inst;
}

// lambda split copies of T(f delta); s has one arc to each root.
inline LowerBoundInstance build_flow_lb(std::size_t n, std::size_t delta, std::size_t f, std::size_t lambda) {
  if (lambda < 1) throw InvalidArgument("flow lower bound needs lambda >= 1");
  lb_detail::check_tree_budget(lambda, n, delta, f);
  GraphBuilder b(0, true);
  const Vertex s = b.add_vertex();
  std::vector<Vertex> leaves;
  std::vector<std::vector<ColorId>> witnesses;
  for (std::size_t i = 0; i < lambda; ++i) {
    const Vertex r = lb_detail::add_split_tree(b, delta, f, leaves, witnesses);
    b.add_edge(s, r);
  }
  const Vertex y0 = b.add_vertices(static_cast<Vertex>(n));
  LowerBoundInstance inst;
  std::vector<std::pair<EdgeId, std::size_t>> xy;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    for (Vertex y = y0; y < y0 + static_cast<Vertex>(n); ++y) xy.emplace_back(b.add_edge(leaves[k], y), k);
  }
  inst.graph = b.build();
  for (auto [e, k] : xy) inst.mandatory.push_back({e, FaultSet::colors(witnesses[k])});
  inst.kind = PreserverKind::Flow;
  inst.sources = {s};
  inst.budget = f;
  inst.lambda = static_cast<int>(lambda);
  inst.expected_mandatory = lambda * ipow(2, f * delta) * n;
  return inst;
}

// Chains u_1..u_{p+1}, v_1..v_{p+1} around a weighted uncolored gstar with p
// demand pairs. Attachment edges (u_i, x_i), (y_i, v_i) weigh p + 1 - i; chain
// edges (u_i, u_{i+1}), (v_i, v_{i+1}) weigh epsilon and share color c_i.
inline LowerBoundInstance build_singlepair_lb(const ColoredGraph& gstar, const PairSet& pstar) {
  if (gstar.directed()) throw InvalidArgument("single-pair lower bound needs an undirected gstar");
  if (!gstar.used_colors().empty()) throw InvalidArgument("gstar must be uncolored");
  if (pstar.empty()) throw InvalidArgument("pair set is empty");
  const Vertex ns = gstar.n();
  const auto p = static_cast<Vertex>(pstar.size());

  // Rescale so every gstar distance is at most 1/2.
  std::int64_t max_scaled = 0;
  std::vector<std::vector<std::int64_t>> dist;
  for (Vertex x = 0; x < ns; ++x) {
    dist.push_back(oracle::distances_from(gstar, x));
    for (auto d : dist.back()) {
      if (d != oracle::kInf) max_scaled = std::max(max_scaled, d);
    }
  }
  for (auto [x, y] : pstar) {
    if (dist[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] == oracle::kInf) {
      throw InvalidArgument("gstar pair (" + std::to_string(x) + ", " + std::to_string(y) + ") is disconnected");
    }
  }
  const Weight factor = max_scaled == 0 ? Weight(1) : Weight(gstar.weight_scale(), 2 * max_scaled);

  const Vertex total_n = ns + 2 * (p + 1);
  const EdgeId total_m = gstar.m() + 4 * p;
  const Weight eps(1, 4 * static_cast<std::int64_t>(total_n) * (total_m + 1));

  GraphBuilder b(ns, false);
  for (const auto& e : gstar.edges()) b.add_edge(e.tail, e.head, e.weight * factor);
  const Vertex u0 = b.add_vertices(p + 1);
  const Vertex v0 = b.add_vertices(p + 1);
  std::vector<ColorId> ci;
  Vertex i = 1;
  for (auto [x, y] : pstar) {
    const Weight w(p + 1 - i);
    b.add_edge(u0 + i - 1, x, w);
    b.add_edge(y, v0 + i - 1, w);
    const ColorId c = b.color("c" + std::to_string(i));
    ci.push_back(c);
    b.add_edge(u0 + i - 1, u0 + i, eps, c);
    b.add_edge(v0 + i - 1, v0 + i, eps, c);
    ++i;
  }
  LowerBoundInstance inst;
  inst.graph = b.build();
  inst.kind = PreserverKind::Distance;
  inst.sources = {u0};
  inst.target = v0;
  inst.budget = 1;

  // gstar edges on every shortest x_i - y_i path.
  std::vector<char> taken(static_cast<std::size_t>(gstar.m()), 0);
  std::size_t k = 0;
  for (auto [x, y] : pstar) {
    const auto base = dist[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
    for (EdgeId e = 0; e < gstar.m(); ++e) {
      if (taken[static_cast<std::size_t>(e)] != 0) continue;
      EdgeMask live(gstar.m());
      live.kill(e);
      if (oracle::distances_from(gstar, x, live)[static_cast<std::size_t>(y)] > base) {
        taken[static_cast<std::size_t>(e)] = 1;
        inst.mandatory.push_back({e, FaultSet::colors({ci[k]})});
      }
    }
    ++k;
  }
  std::sort(inst.mandatory.begin(), inst.mandatory.end(),
            [](const MandatoryEdge& a, const MandatoryEdge& b) { return a.edge < b.edge; });
  inst.expected_mandatory = inst.mandatory.size();
  return inst;
}

inline std::string kind_name(PreserverKind k) {
  switch (k) {
    case PreserverKind::Distance: return "distance";
    case PreserverKind::Reachability: return "reachability";
    case PreserverKind::Flow: return "flow";
  }
  return "distance";
}

// Manifest sidecar: header keys then "m <edge-id> <color>[,<color>...]".
inline void write_manifest(std::ostream& out, const LowerBoundInstance& inst) {
  out << "cftm 1\n" << "kind " << kind_name(inst.kind) << "\n" << "budget " << inst.budget << "\n";
  if (inst.kind == PreserverKind::Flow) out << "lambda " << inst.lambda << "\n";
  out << "sources";
  for (Vertex s : inst.sources) out << ' ' << s;
  out << "\n";
  if (inst.target) out << "target " << *inst.target << "\n";
  out << "expected " << inst.expected_mandatory << "\n";
  for (const auto& m : inst.mandatory) {
    out << "m " << m.edge << ' ';
    if (m.witness.empty()) out << '-';
    for (std::size_t i = 0; i < m.witness.size(); ++i) {
      out << (i ? "," : "") << inst.graph.color_name(m.witness.members()[i]);
    }
    out << '\n';
  }
}

// Reads a manifest against its graph.
inline LowerBoundInstance read_manifest(std::istream& in, ColoredGraph graph) {
  using namespace io_detail;
  LowerBoundInstance inst;
  inst.graph = std::move(graph);
  std::string raw;
  std::size_t lineno = 0;
  bool header = false;
  auto num = [&](std::string_view s) {
    auto v = parse_int<std::int64_t>(s);
    if (!v || *v < 0) throw ParseError(lineno, "expected a non-negative integer, got '" + std::string(s) + "'");
    return *v;
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    const auto tok = tokens(line);
    if (!header) {
      if (tok.size() != 2 || tok[0] != "cftm" || tok[1] != "1") throw ParseError(lineno, "expected header 'cftm 1'");
      header = true;
    } else if (tok[0] == "kind" && tok.size() == 2) {
      if (tok[1] == "distance") inst.kind = PreserverKind::Distance;
      else if (tok[1] == "reachability") inst.kind = PreserverKind::Reachability;
      else if (tok[1] == "flow") inst.kind = PreserverKind::Flow;
      else throw ParseError(lineno, "unknown kind");
    } else if (tok[0] == "budget" && tok.size() == 2) {
      inst.budget = static_cast<std::size_t>(num(tok[1]));
    } else if (tok[0] == "lambda" && tok.size() == 2) {
      inst.lambda = static_cast<int>(num(tok[1]));
    } else if (tok[0] == "sources") {
      for (std::size_t i = 1; i < tok.size(); ++i) inst.sources.push_back(static_cast<Vertex>(num(tok[i])));
    } else if (tok[0] == "target" && tok.size() == 2) {
      inst.target = static_cast<Vertex>(num(tok[1]));
    } else if (tok[0] == "expected" && tok.size() == 2) {
      inst.expected_mandatory = static_cast<std::size_t>(num(tok[1]));
    } else if (tok[0] == "m" && tok.size() == 3) {
      const auto e = static_cast<EdgeId>(num(tok[1]));
      if (e >= inst.graph.m()) throw ParseError(lineno, "edge id out of range");
      std::vector<ColorId> cs;
      if (tok[2] != "-") {
        std::string_view rest = tok[2];
        while (!rest.empty()) {
          const auto comma = rest.find(',');
          const auto name = rest.substr(0, comma);
          // a color with an empty class is not stored in the graph file
          if (auto c = inst.graph.find_color(name)) cs.push_back(*c);
          rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
      }
      inst.mandatory.push_back({e, FaultSet::colors(std::move(cs))});
    } else {
      throw ParseError(lineno, "unknown manifest record '" + std::string(tok[0]) + "'");
    }
  }
  if (!header) throw ParseError(lineno, "empty manifest");
  return inst;
}

}  // namespace cftg
