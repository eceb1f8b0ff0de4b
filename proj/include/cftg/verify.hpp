#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cftg/derived.hpp"
#include "cftg/graph.hpp"
#include "cftg/lowerbounds.hpp"
#include "cftg/metric.hpp"
#include "cftg/oracle.hpp"
#include "cftg/parallel.hpp"
#include "cftg/sourcewise_eft.hpp"

namespace cftg {

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "FAIL";
}

struct Counterexample {
  Vertex s = 0;
  Vertex t = 0;
  FaultSet fault;
  std::string expected;
  std::string observed;
  std::string note;
};

struct VerificationReport {
  std::string check;
  Verdict verdict = Verdict::Pass;
  std::size_t checks_run = 0;
  std::size_t fault_sets = 0;
  std::size_t failures = 0;  // counterexamples may be truncated; this is not
  std::vector<Counterexample> counterexamples;
  double elapsed_seconds = 0.0;

  [[nodiscard]] bool pass() const noexcept { return verdict == Verdict::Pass; }

  void add(Counterexample c, std::size_t keep = 1000) {
    ++failures;
    verdict = Verdict::Fail;
    if (counterexamples.size() < keep) counterexamples.push_back(std::move(c));
  }
};

inline std::string format_fault(const ColoredGraph& g, const FaultSet& f) {
  if (f.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ';';
    const auto x = f.members()[i];
    out += f.mode() == FaultMode::Color ? (x >= 0 && x < g.color_count() ? g.color_name(x) : std::to_string(x))
                                        : "e" + std::to_string(x);
  }
  return out;
}

// One row per counterexample, then a summary row.
inline void write_report_csv(std::ostream& out, const VerificationReport& r, const ColoredGraph& g) {
  out << "row,check,s,t,fault,expected,observed,note\n";
  for (const auto& c : r.counterexamples) {
    out << "counterexample," << r.check << ',' << c.s << ',' << c.t << ',' << format_fault(g, c.fault) << ','
        << c.expected << ',' << c.observed << ',' << c.note << '\n';
  }
  out << "summary," << r.check << ",,,," << "verdict=" << verdict_name(r.verdict) << ",checks=" << r.checks_run
      << ",fault_sets=" << r.fault_sets << " failures=" << r.failures << '\n';
}

namespace verify_detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::string format_distance(const ColoredGraph& g, std::int64_t d) {
  if (d == oracle::kInf) return "inf";
  return format_weight(g.unscale(d));
}

// Every k-subset (k <= f) of `items`, smallest first, including the empty set.
inline std::vector<std::vector<std::int32_t>> subsets_up_to(const std::vector<std::int32_t>& items, std::size_t f) {
  std::vector<std::vector<std::int32_t>> out{{}};
  std::vector<std::int32_t> cur;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t from, std::size_t left) {
    if (left == 0) return;
    for (std::size_t i = from; i < items.size(); ++i) {
      cur.push_back(items[i]);
      out.push_back(cur);
      rec(i + 1, left - 1);
      cur.pop_back();
    }
  };
  rec(0, f);
  return out;
}

// sum_{k <= f} C(count, k), saturating.
inline std::size_t subset_count(std::size_t count, std::size_t f) {
  long double total = 0;
  long double c = 1;
  for (std::size_t k = 0; k <= f && k <= count; ++k) {
    total += c;
    c = c * static_cast<long double>(count - k) / static_cast<long double>(k + 1);
  }
  return total > 1e18L ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(total);
}

// Fault sets over used colors (COLOR) or all edge ids (EDGE).
inline std::vector<FaultSet> fault_sets(const ColoredGraph& g, std::size_t f, FaultMode mode) {
  std::vector<std::int32_t> items;
  if (mode == FaultMode::Color) {
    items = g.used_colors();
  } else {
    items.resize(static_cast<std::size_t>(g.m()));
    std::iota(items.begin(), items.end(), 0);
  }
  std::vector<FaultSet> out;
  for (auto& s : subsets_up_to(items, f)) out.emplace_back(mode, std::move(s));
  return out;
}

inline std::size_t fault_set_count(const ColoredGraph& g, std::size_t f, FaultMode mode) {
  return subset_count(mode == FaultMode::Color ? g.used_colors().size() : static_cast<std::size_t>(g.m()), f);
}

}  // namespace verify_detail

struct VerifyOptions {
  std::size_t cap = 10'000'000;  // fault set x pair checks
};

// Demands grouped by source.
using DemandMap = std::map<Vertex, std::vector<Vertex>>;

inline DemandMap demands_of(const PairSet& pairs) {
  DemandMap d;
  for (auto [s, t] : pairs) d[s].push_back(t);
  return d;
}

inline DemandMap sourcewise_demands(const ColoredGraph& g, std::span<const Vertex> sources) {
  DemandMap d;
  for (Vertex s : sources) {
    auto& ts = d[s];
    ts.resize(static_cast<std::size_t>(g.n()));
    std::iota(ts.begin(), ts.end(), 0);
  }
  return d;
}

// dist_{H-F}(s, t) = dist_{G-F}(s, t) for every demand and |F| <= f.
inline VerificationReport verify_distance_preserver(const ColoredGraph& g, const Subgraph& h, const DemandMap& demands,
                                                    std::size_t f, FaultMode mode, const VerifyOptions& opt = {}) {
  using namespace verify_detail;
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.check = "distance";
  std::size_t pairs = 0;
  for (const auto& [s, ts] : demands) pairs += ts.size();
  rep.fault_sets = fault_set_count(g, f, mode);
  if (rep.fault_sets > opt.cap || rep.fault_sets * std::max<std::size_t>(1, pairs) > opt.cap) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  const auto faults = fault_sets(g, f, mode);
  const EdgeMask hmask = h.mask();
  std::vector<std::vector<Counterexample>> found(faults.size());
  parallel_for(faults.size(), [&](std::size_t i) {
    const EdgeMask gl = apply_fault(g, faults[i]);
    const EdgeMask hl = apply_fault(g, faults[i], hmask);
    for (const auto& [s, ts] : demands) {
      const auto dg = oracle::distances_from(g, s, gl);
      const auto dh = oracle::distances_from(g, s, hl);
      for (Vertex t : ts) {
        const auto a = dg[static_cast<std::size_t>(t)];
        const auto b = dh[static_cast<std::size_t>(t)];
        if (a != b) found[i].push_back({s, t, faults[i], format_distance(g, a), format_distance(g, b), ""});
      }
    }
  });
  rep.checks_run = faults.size() * pairs;
  for (auto& v : found) {
    for (auto& c : v) rep.add(std::move(c));
  }
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

inline VerificationReport verify_distance_preserver(const ColoredGraph& g, const Subgraph& h, const PairSet& pairs,
                                                    std::size_t f, FaultMode mode, const VerifyOptions& opt = {}) {
  return verify_distance_preserver(g, h, demands_of(pairs), f, mode, opt);
}

struct StretchHistogram {
  std::map<std::int64_t, std::size_t> counts;  // stretch -> occurrences (finite pairs)
};

// dist_{H-F}(u, v) <= dist_{G-F}(u, v) + stretch for all u, v and |F| <= f.
inline VerificationReport verify_additive_spanner(const ColoredGraph& g, const Subgraph& h, std::int64_t stretch,
                                                  std::size_t f, FaultMode mode, StretchHistogram* hist = nullptr,
                                                  const VerifyOptions& opt = {}) {
  using namespace verify_detail;
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.check = "spanner";
  const auto n = static_cast<std::size_t>(g.n());
  rep.fault_sets = fault_set_count(g, f, mode);
  if (rep.fault_sets * std::max<std::size_t>(1, n * n) > opt.cap) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  const auto faults = fault_sets(g, f, mode);
  const EdgeMask hmask = h.mask();
  const std::int64_t slack = stretch * g.weight_scale();
  std::vector<std::vector<Counterexample>> found(faults.size());
  std::vector<std::map<std::int64_t, std::size_t>> hists(faults.size());
  parallel_for(faults.size(), [&](std::size_t i) {
    const EdgeMask gl = apply_fault(g, faults[i]);
    const EdgeMask hl = apply_fault(g, faults[i], hmask);
    for (Vertex u = 0; u < g.n(); ++u) {
      const auto dg = oracle::distances_from(g, u, gl);
      const auto dh = oracle::distances_from(g, u, hl);
      for (Vertex v = 0; v < g.n(); ++v) {
        const auto a = dg[static_cast<std::size_t>(v)];
        const auto b = dh[static_cast<std::size_t>(v)];
        const bool ok = a == oracle::kInf ? b == oracle::kInf : (b != oracle::kInf && b >= a && b - a <= slack);
        if (!ok) found[i].push_back({u, v, faults[i], format_distance(g, a), format_distance(g, b), "stretch"});
        if (a != oracle::kInf && b != oracle::kInf) ++hists[i][b - a];
      }
    }
  });
  rep.checks_run = faults.size() * n * n;
  for (std::size_t i = 0; i < faults.size(); ++i) {
    for (auto& c : found[i]) rep.add(std::move(c));
    if (hist) {
      for (auto [k, c] : hists[i]) hist->counts[k] += c;
    }
  }
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

// Reachability from s in H - F equals that in G - F for all t and |F| <= f.
inline VerificationReport verify_reachability_preserver(const ColoredGraph& g, const Subgraph& h, Vertex s,
                                                        std::size_t f, FaultMode mode = FaultMode::Color,
                                                        const VerifyOptions& opt = {}) {
  using namespace verify_detail;
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.check = "reachability";
  rep.fault_sets = fault_set_count(g, f, mode);
  if (rep.fault_sets * static_cast<std::size_t>(std::max<Vertex>(1, g.n())) > opt.cap) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  const auto faults = fault_sets(g, f, mode);
  const EdgeMask hmask = h.mask();
  std::vector<std::vector<Counterexample>> found(faults.size());
  parallel_for(faults.size(), [&](std::size_t i) {
    const auto rg = oracle::reachable_from(g, s, apply_fault(g, faults[i]));
    const auto rh = oracle::reachable_from(g, s, apply_fault(g, faults[i], hmask));
    for (Vertex t = 0; t < g.n(); ++t) {
      const auto a = rg[static_cast<std::size_t>(t)];
      const auto b = rh[static_cast<std::size_t>(t)];
      if (a != b) found[i].push_back({s, t, faults[i], a ? "1" : "0", b ? "1" : "0", "reachable"});
    }
  });
  rep.checks_run = faults.size() * static_cast<std::size_t>(g.n());
  for (auto& v : found) {
    for (auto& c : v) rep.add(std::move(c));
  }
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

inline int max_disjoint_paths(const ColoredGraph& g, Vertex s, Vertex t, int cap) {
  if (cap < 1) throw InvalidArgument("cap must be at least 1");
  return oracle::max_disjoint_paths(g, s, t, cap, EdgeMask(g.m()));
}

// For every |F| <= f colors and every t: with alpha the number of
// edge-disjoint s-t paths in G - F (capped at lambda + 1), H - F must carry
// min(alpha, lambda) of them.
inline VerificationReport verify_flow_preserver(const ColoredGraph& g, const Subgraph& h, Vertex s, std::size_t f,
                                                int lambda, FaultMode mode = FaultMode::Color,
                                                const VerifyOptions& opt = {}) {
  using namespace verify_detail;
  if (lambda < 1) throw InvalidArgument("lambda must be at least 1");
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.check = "flow";
  rep.fault_sets = fault_set_count(g, f, mode);
  if (rep.fault_sets * static_cast<std::size_t>(std::max<Vertex>(1, g.n())) > opt.cap) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  const auto faults = fault_sets(g, f, mode);
  const EdgeMask hmask = h.mask();
  std::vector<std::vector<Counterexample>> found(faults.size());
  parallel_for(faults.size(), [&](std::size_t i) {
    const EdgeMask gl = apply_fault(g, faults[i]);
    const EdgeMask hl = apply_fault(g, faults[i], hmask);
    for (Vertex t = 0; t < g.n(); ++t) {
      const int alpha = oracle::max_disjoint_paths(g, s, t, lambda + 1, gl);
      const int need = std::min(alpha, lambda);
      const int got = oracle::max_disjoint_paths(g, s, t, lambda, hl);
      if (got < need) found[i].push_back({s, t, faults[i], std::to_string(need), std::to_string(got), "disjoint paths"});
    }
  });
  rep.checks_run = faults.size() * static_cast<std::size_t>(g.n());
  for (auto& v : found) {
    for (auto& c : v) rep.add(std::move(c));
  }
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

// True when G - e violates the instance's preserver condition under F, i.e.
// e is needed to handle the fault F.
inline bool probe_mandatory(const LowerBoundInstance& inst, EdgeId e, const FaultSet& fault) {
  const auto& g = inst.graph;
  const EdgeMask full = apply_fault(g, fault);
  EdgeMask without = full;
  without.kill(e);
  for (Vertex s : inst.sources) {
    switch (inst.kind) {
      case PreserverKind::Distance: {
        const auto a = oracle::distances_from(g, s, full);
        const auto b = oracle::distances_from(g, s, without);
        if (inst.target) {
          if (a[static_cast<std::size_t>(*inst.target)] != b[static_cast<std::size_t>(*inst.target)]) return true;
        } else if (a != b) {
          return true;
        }
        break;
      }
      case PreserverKind::Reachability:
        if (oracle::reachable_from(g, s, full) != oracle::reachable_from(g, s, without)) return true;
        break;
      case PreserverKind::Flow:
        for (Vertex t = 0; t < g.n(); ++t) {
          const int need = std::min(oracle::max_disjoint_paths(g, s, t, inst.lambda + 1, full), inst.lambda);
          if (oracle::max_disjoint_paths(g, s, t, inst.lambda, without) < need) return true;
        }
        break;
    }
  }
  return false;
}

// Confirms each (e, F): removing e from G breaks the preserver condition
// under F, and every witness respects the budget.
inline VerificationReport verify_mandatory_edges(const LowerBoundInstance& inst) {
  using namespace verify_detail;
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.check = "mandatory";
  rep.fault_sets = inst.mandatory.size();
  std::vector<char> ok(inst.mandatory.size(), 0);
  parallel_for(inst.mandatory.size(), [&](std::size_t i) {
    const auto& m = inst.mandatory[i];
    ok[i] = static_cast<char>(m.witness.within_budget(inst.budget) && probe_mandatory(inst, m.edge, m.witness));
  });
  rep.checks_run = inst.mandatory.size();
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (ok[i] != 0) continue;
    const auto& e = inst.graph.edge(inst.mandatory[i].edge);
    rep.add({e.tail, e.head, inst.mandatory[i].witness, "mandatory", "not needed",
             "edge " + std::to_string(inst.mandatory[i].edge)});
  }
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

// Checks a tree against its family's closed forms and per-leaf property (a).
// Leaves are recomputed from the graph, not taken from the instance.
inline VerificationReport verify_tree_properties(const ColoredTreeInstance& t) {
  using namespace verify_detail;
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.check = "tree";
  const auto& g = t.graph;
  auto fail = [&](Vertex v, const std::string& expected, const std::string& observed, const std::string& note) {
    rep.add({t.root, v, {}, expected, observed, note});
  };

  std::vector<std::size_t> degree(static_cast<std::size_t>(g.n()), 0);
  for (const auto& e : g.edges()) {
    ++degree[static_cast<std::size_t>(e.tail)];
    ++degree[static_cast<std::size_t>(e.head)];
  }
  std::vector<Vertex> leaves;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (g.n() == 1 || (v != t.root && degree[static_cast<std::size_t>(v)] == 1)) leaves.push_back(v);
  }
  auto declared = t.leaves;
  std::sort(declared.begin(), declared.end());
  ++rep.checks_run;
  if (leaves != declared) fail(-1, std::to_string(declared.size()), std::to_string(leaves.size()), "leaf set");
  ++rep.checks_run;
  if (leaves.size() != t.expected_leaves) {
    fail(-1, std::to_string(t.expected_leaves), std::to_string(leaves.size()), "leaf count");
  }
  ++rep.checks_run;
  if (static_cast<std::size_t>(g.m()) != t.expected_edges) {
    fail(-1, std::to_string(t.expected_edges), std::to_string(g.m()), "edge count");
  }
  ++rep.checks_run;
  if (static_cast<std::size_t>(g.m()) + 1 != static_cast<std::size_t>(g.n())) {
    fail(-1, std::to_string(g.n() - 1), std::to_string(g.m()), "not a tree");
  }
  for (ColorId c : g.used_colors()) {
    ++rep.checks_run;
    if (g.color_class(c).size() > t.delta) {
      fail(-1, "<= " + std::to_string(t.delta), std::to_string(g.color_class(c).size()), "class " + g.color_name(c));
    }
  }
  const auto depth = oracle::distances_from(g, t.root);
  for (Vertex v : leaves) {
    const auto d = depth[static_cast<std::size_t>(v)];
    if (t.family == TreeFamily::DeltaQ) {
      ++rep.checks_run;
      if (d == oracle::kInf || d < static_cast<std::int64_t>(t.min_depth) || d > static_cast<std::int64_t>(t.max_depth)) {
        fail(v, "[" + std::to_string(t.min_depth) + "," + std::to_string(t.max_depth) + "]", format_distance(g, d),
             "leaf depth");
      }
    }
    ++rep.checks_run;
    auto it = t.leaf_color.find(v);
    if (it == t.leaf_color.end()) {
      fail(v, "c_v", "none", "leaf has no color");
      continue;
    }
    const FaultSet fault = FaultSet::colors({it->second});
    const auto cut = oracle::distances_from(g, t.root, apply_fault(g, fault));
    std::vector<Vertex> alive;
    for (Vertex x : leaves) {
      if (cut[static_cast<std::size_t>(x)] != oracle::kInf) alive.push_back(x);
    }
    bool ok = false;
    if (t.family == TreeFamily::Binary) {
      ok = alive.size() == 1 && alive[0] == v;
    } else {
      const auto dv = cut[static_cast<std::size_t>(v)];
      ok = dv != oracle::kInf && std::all_of(alive.begin(), alive.end(), [&](Vertex x) {
             return x == v || cut[static_cast<std::size_t>(x)] > dv;
           });
    }
    if (!ok) {
      rep.add({t.root, v, fault, "property (a)", std::to_string(alive.size()) + " surviving leaves", "leaf " + std::to_string(v)});
    }
  }
  rep.elapsed_seconds = seconds_since(t0);
  return rep;
}

// union over s, t and colors c of pi(s, t) and pi(s, t | c).
inline Subgraph obvious_cft_preserver(const ColoredGraph& g, const TieBrokenMetric& metric,
                                      std::span<const Vertex> sources) {
  Subgraph h(g);
  for (Vertex s : sources) {
    h.insert_all(ShortestPathTree(g, metric, s).tree_edges());
    for (ColorId c : g.used_colors()) {
      const EdgeMask live = apply_fault(g, FaultSet::colors({c}));
      h.insert_all(ShortestPathTree(g, metric, s, &live).tree_edges());
    }
  }
  return h;
}

// LastE(s, t) and LastE(s, t | c) are in H for all s, t, c.
inline VerificationReport verify_last_edge_closure(const ColoredGraph& g, const TieBrokenMetric& metric,
                                                   const Subgraph& h, std::span<const Vertex> sources) {
  VerificationReport rep;
  rep.check = "last-edge";
  std::vector<FaultSet> faults{FaultSet::colors({})};
  for (ColorId c : g.used_colors()) faults.push_back(FaultSet::colors({c}));
  rep.fault_sets = faults.size();
  for (Vertex s : sources) {
    for (const auto& f : faults) {
      const EdgeMask live = apply_fault(g, f);
      ShortestPathTree tree(g, metric, s, &live);
      for (Vertex t = 0; t < g.n(); ++t) {
        ++rep.checks_run;
        auto e = tree.last_edge(t);
        if (e && !h.contains(*e)) rep.add({s, t, f, "e" + std::to_string(*e), "missing", "last edge"});
      }
    }
  }
  return rep;
}

// Tiebreaking contract on pi(u, v | F).
struct ContractReport {
  std::size_t consistency_checks = 0;
  std::size_t consistency_violations = 0;
  std::size_t stability_checks = 0;
  std::size_t stability_violations = 0;
  std::size_t weight_checks = 0;
  std::size_t weight_violations = 0;
};

// Consistency: every subpath x..y of pi(u, v | F) is pi(x, y | F).
// Stability: pi(u, v | F + e) = pi(u, v | F) for every edge e off the path.
// Weight fidelity: the path weighs dist_{G-F}(u, v).
inline void check_tiebreak_contract(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex u, Vertex v,
                                    const FaultSet& edge_faults, ContractReport& rep) {
  const EdgeMask live = apply_fault(g, edge_faults);
  const Path p = ShortestPathTree(g, metric, u, &live).path_to(v);
  ++rep.weight_checks;
  const auto d = oracle::distances_from(g, u, live)[static_cast<std::size_t>(v)];
  if ((d == oracle::kInf) == p.reachable || (p.reachable && d != p.scaled_weight)) ++rep.weight_violations;
  if (!p.reachable) return;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    ShortestPathTree from_x(g, metric, p.vertices[i], &live);
    for (std::size_t j = i + 1; j < p.vertices.size(); ++j) {
      ++rep.consistency_checks;
      const Path sub = from_x.path_to(p.vertices[j]);
      if (!std::equal(sub.edges.begin(), sub.edges.end(), p.edges.begin() + static_cast<std::ptrdiff_t>(i),
                      p.edges.begin() + static_cast<std::ptrdiff_t>(j)) ||
          sub.edges.size() != j - i) {
        ++rep.consistency_violations;
      }
    }
  }
  std::vector<char> on(static_cast<std::size_t>(g.m()), 0);
  for (EdgeId e : p.edges) on[static_cast<std::size_t>(e)] = 1;
  for (EdgeId e = 0; e < g.m(); ++e) {
    if (on[static_cast<std::size_t>(e)] != 0 || !live(e)) continue;
    ++rep.stability_checks;
    auto members = edge_faults.members();
    members.push_back(e);
    EdgeMask more = live;
    more.kill(e);
    if (ShortestPathTree(g, metric, u, &more).path_to(v) != p) ++rep.stability_violations;
  }
}

// Cover check for near-set generation and the far-set key claim, by
// exhaustive enumeration of all F with |F| <= f.
struct NearCoverReport {
  std::size_t fault_sets = 0;
  std::size_t minimal = 0;
  std::size_t near = 0;
  std::size_t far = 0;
  std::size_t uncovered = 0;        // minimal near sets the generation missed
  std::size_t claim_checks = 0;     // (far F, j, a) triples
  std::size_t claim_failures = 0;
  std::size_t not_canonical = 0;    // minimal sets without a canonical order
};

namespace verify_detail {

// True when some permutation sigma has delta_i <= limit[sigma(i)].
template <typename T>
bool fits_some_permutation(const std::vector<std::int64_t>& deltas, const std::vector<T>& limit) {
  std::vector<std::size_t> perm(deltas.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    bool ok = true;
    for (std::size_t i = 0; i < deltas.size() && ok; ++i) ok = static_cast<long double>(deltas[i]) <= static_cast<long double>(limit[perm[i]]);
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace verify_detail

inline NearCoverReport check_near_cover(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex s,
                                        const EftThresholds& th) {
  using verify_detail::fits_some_permutation;
  const std::size_t f = th.f;
  NearCoverReport rep;
  std::vector<std::int32_t> all(static_cast<std::size_t>(g.m()));
  std::iota(all.begin(), all.end(), 0);
  const auto subsets = verify_detail::subsets_up_to(all, f);
  rep.fault_sets = subsets.size();
  std::map<std::vector<EdgeId>, std::unique_ptr<ShortestPathTree>> trees;
  auto tree_of = [&](std::vector<EdgeId> fs) -> const ShortestPathTree& {
    std::sort(fs.begin(), fs.end());
    auto it = trees.find(fs);
    if (it != trees.end()) return *it->second;
    const EdgeMask live = apply_fault(g, FaultSet::edges(fs));
    return *trees.emplace(fs, std::make_unique<ShortestPathTree>(g, metric, s, &live)).first->second;
  };
  for (const auto& fs : subsets) tree_of(fs);

  FaultTreeCache cache(g, metric, s);
  for (Vertex t = 0; t < g.n(); ++t) {
    const auto gen = generate_near_sets(g, metric, s, t, th, &cache);
    std::set<std::vector<EdgeId>> generated;
    for (const auto& x : gen.fault_sets) generated.insert(x.sorted);

    for (const auto& fs : subsets) {
      if (fs.empty()) continue;
      const Path pf = tree_of(fs).path_to(t);
      // Minimal: every strict subset yields a different path.
      bool minimal = true;
      for (std::size_t mask = 0; mask + 1 < (std::size_t{1} << fs.size()) && minimal; ++mask) {
        std::vector<EdgeId> sub;
        for (std::size_t b = 0; b < fs.size(); ++b) {
          if (mask & (std::size_t{1} << b)) sub.push_back(fs[b]);
        }
        if (tree_of(sub).path_to(t) == pf) minimal = false;
      }
      if (!minimal) continue;
      ++rep.minimal;

      // Canonical order and delta_i = dist(e_i, t | F_i).
      std::vector<EdgeId> order;
      std::vector<std::int64_t> deltas;
      std::vector<EdgeId> rest(fs.begin(), fs.end());
      bool canonical = true;
      while (!rest.empty()) {
        const Path p = tree_of(order).path_to(t);
        std::optional<EdgeId> last;
        for (auto it = p.edges.rbegin(); it != p.edges.rend() && !last; ++it) {
          if (std::find(rest.begin(), rest.end(), *it) != rest.end()) last = *it;
        }
        if (!last) {
          canonical = false;
          break;
        }
        deltas.push_back(oracle::edge_distance(g, *last, t, apply_fault(g, FaultSet::edges(order))));
        order.push_back(*last);
        std::erase(rest, *last);
      }
      if (!canonical) {
        ++rep.not_canonical;
        continue;
      }
      const std::vector<double> real(th.values.begin(), th.values.begin() + static_cast<std::ptrdiff_t>(fs.size()));
      if (fits_some_permutation(deltas, real)) {
        ++rep.near;
        if (generated.count(fs) == 0) ++rep.uncovered;
      }

      // Far with respect to the rounded thresholds ceil(d_j): the key claim.
      const std::vector<std::size_t> rounded(th.suffix.begin(), th.suffix.begin() + static_cast<std::ptrdiff_t>(fs.size()));
      if (fits_some_permutation(deltas, rounded) || !pf.reachable) continue;
      ++rep.far;
      std::vector<std::size_t> tau(fs.size());
      std::iota(tau.begin(), tau.end(), std::size_t{0});
      std::stable_sort(tau.begin(), tau.end(), [&](std::size_t a, std::size_t b) { return deltas[a] > deltas[b]; });
      for (std::size_t j = 0; j < fs.size(); ++j) {
        if (!(deltas[tau[j]] > static_cast<std::int64_t>(rounded[j]))) continue;
        std::vector<EdgeId> fprime;
        for (std::size_t k = 0; k <= j; ++k) fprime.push_back(order[tau[k]]);
        std::vector<EdgeId> remaining;
        for (EdgeId e : fs) {
          if (std::find(fprime.begin(), fprime.end(), e) == fprime.end()) remaining.push_back(e);
        }
        const EdgeMask live_f = apply_fault(g, FaultSet::edges(fs));
        const EdgeMask live_r = apply_fault(g, FaultSet::edges(remaining));
        for (Vertex a : pf.suffix_vertices(rounded[j])) {
          ++rep.claim_checks;
          if (ShortestPathTree(g, metric, a, &live_f).path_to(t) != ShortestPathTree(g, metric, a, &live_r).path_to(t)) {
            ++rep.claim_failures;
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace cftg
