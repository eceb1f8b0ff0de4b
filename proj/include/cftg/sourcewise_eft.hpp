#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "cftg/error.hpp"
#include "cftg/graph.hpp"
#include "cftg/hitting.hpp"
#include "cftg/metric.hpp"
#include "cftg/parallel.hpp"
#include "cftg/sourcewise_cft.hpp"

namespace cftg {

// d_i = base^(1 / 2^i), i = 1..f.
struct EftThresholds {
  std::size_t f = 0;
  double base = 0.0;
  std::vector<double> values;
  std::vector<std::size_t> suffix;  // ceil(d_i)

  [[nodiscard]] std::vector<Threshold> as_thresholds() const {
    std::vector<Threshold> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back({values[i], suffix[i]});
    return out;
  }
};

inline EftThresholds eft_thresholds_from_base(double base, std::size_t f, Vertex n) {
  EftThresholds t;
  t.f = f;
  t.base = base;
  const double b = std::max(base, 1e-300);
  for (std::size_t i = 1; i <= f; ++i) {
    const double d = threshold_detail::clean(std::pow(b, 1.0 / std::pow(2.0, static_cast<double>(i))), n);
    t.values.push_back(d);
    t.suffix.push_back(threshold_detail::ceil_len(d));
  }
  return t;
}

// base = (n / sigma) ln n.
inline EftThresholds eft_thresholds(Vertex n, std::size_t sigma, std::size_t f) {
  if (n < 2 || sigma < 1 || sigma > static_cast<std::size_t>(n)) throw InvalidArgument("need n >= 2 and 1 <= sigma <= n");
  const double base = static_cast<double>(n) / static_cast<double>(sigma) * std::log(static_cast<double>(n));
  return eft_thresholds_from_base(base, f, n);
}

// Shortest-path trees from one source keyed by sorted edge-fault set.
class FaultTreeCache {
 public:
  FaultTreeCache(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex source, std::size_t capacity = 1 << 14)
      : g_(&g), metric_(&metric), source_(source), capacity_(capacity) {}

  [[nodiscard]] Vertex source() const noexcept { return source_; }

  const ShortestPathTree& get(const std::vector<EdgeId>& sorted_faults) {
    if (auto it = trees_.find(sorted_faults); it != trees_.end()) return *it->second;
    if (trees_.size() >= capacity_) trees_.clear();
    const EdgeMask live = apply_fault(*g_, FaultSet::edges(sorted_faults));
    auto tree = std::make_unique<ShortestPathTree>(*g_, *metric_, source_, &live);
    return *trees_.emplace(sorted_faults, std::move(tree)).first->second;
  }

 private:
  const ColoredGraph* g_;
  const TieBrokenMetric* metric_;
  Vertex source_;
  std::size_t capacity_;
  std::map<std::vector<EdgeId>, std::unique_ptr<ShortestPathTree>> trees_;
};

struct GeneratedFaultSet {
  std::vector<EdgeId> order;              // e_1..e_k as generated
  std::vector<std::size_t> permutation;   // sigma(i), 0-based threshold indices
  std::vector<EdgeId> sorted;
  std::optional<EdgeId> last_edge;        // LastE(s, t | F)
};

struct NearGeneration {
  Vertex s = 0;
  Vertex t = 0;
  std::vector<GeneratedFaultSet> fault_sets;  // deduplicated by set equality
  std::vector<EdgeId> near_edges;             // sorted, distinct
  std::size_t sequences = 0;                  // generated sequences before dedup
  std::size_t sequence_bound = 0;             // sum_k k! prod_{j<=k} ceil(d_j)
};

namespace eft_detail {

inline std::size_t sequence_bound(std::span<const std::size_t> suffix) {
  std::size_t total = 0;
  std::size_t fact = 1;
  std::size_t prod = 1;
  total += 1;  // k = 0
  for (std::size_t k = 1; k <= suffix.size(); ++k) {
    fact *= k;
    prod *= suffix[k - 1];
    total += fact * prod;
  }
  return total;
}

}  // namespace eft_detail

// For every k <= f and permutation sigma of the first k thresholds, picks e_i
// from the ceil(d_sigma(i))-suffix of pi(s, t | e_1..e_{i-1}) and records
// LastE(s, t | {e_1..e_k}).
inline NearGeneration generate_near_sets(const ColoredGraph& g, const TieBrokenMetric& metric, Vertex s, Vertex t,
                                         const EftThresholds& thresholds, FaultTreeCache* cache = nullptr) {
  if (t < 0 || t >= g.n()) throw InvalidArgument("target vertex out of range");
  std::optional<FaultTreeCache> local;
  if (cache == nullptr || cache->source() != s) cache = &local.emplace(g, metric, s);

  NearGeneration out;
  out.s = s;
  out.t = t;
  out.sequence_bound = eft_detail::sequence_bound(thresholds.suffix);
  std::set<std::vector<EdgeId>> seen;
  std::set<EdgeId> near;

  std::vector<EdgeId> order;
  std::vector<std::size_t> perm;
  auto sorted_of = [](std::vector<EdgeId> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  auto extend = [&](auto&& self, std::size_t i) -> void {
    const auto faults = sorted_of(order);
    const ShortestPathTree& tree = cache->get(faults);
    if (i == perm.size()) {
      ++out.sequences;
      if (!seen.insert(faults).second) return;
      GeneratedFaultSet gen{order, perm, faults, tree.last_edge(t)};
      if (gen.last_edge) near.insert(*gen.last_edge);
      out.fault_sets.push_back(std::move(gen));
      return;
    }
    if (!tree.reached(t)) return;
    for (EdgeId e : tree.suffix_edges(t, thresholds.suffix[perm[i]])) {
      order.push_back(e);
      self(self, i + 1);
      order.pop_back();
    }
  };

  for (std::size_t k = 0; k <= thresholds.values.size(); ++k) {
    perm.resize(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      extend(extend, 0);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  out.near_edges.assign(near.begin(), near.end());
  return out;
}

struct EftSourcewiseOptions {
  HittingMode hitting = HittingMode::Greedy;
  std::uint64_t seed = 0;
  std::optional<double> threshold_base;  // replaces (n / sigma) ln n at every level
  std::size_t exhaustive_edge_budget = 2;
};

struct EftSourcewiseResult {
  Subgraph h;
  EftThresholds thresholds;
  HittingFamily hitting;
  std::size_t near_edges = 0;      // |E_near| at the top level
  std::size_t sequences = 0;       // generated sequences at the top level
  std::size_t sequence_bound = 0;  // sum over (s, t) of the per-pair bound
  std::size_t depth = 0;           // deepest recursion level reached
  bool hitting_verified = true;    // every level's hitting family was verified
};

namespace eft_detail {

inline EftSourcewiseResult build(const ColoredGraph& g, const TieBrokenMetric& metric, std::vector<Vertex> sources,
                                 std::size_t f, const EftSourcewiseOptions& options, std::size_t depth) {
  const Vertex n = std::max<Vertex>(2, g.n());
  const auto sigma = std::min<std::size_t>(sources.size(), static_cast<std::size_t>(n));
  EftThresholds th = options.threshold_base ? eft_thresholds_from_base(*options.threshold_base, f, g.n())
                                            : eft_thresholds(n, sigma, f);
  HittingOptions hopt;
  hopt.mode = options.hitting;
  hopt.seed = options.seed + depth;
  hopt.exhaustive_edge_budget = options.exhaustive_edge_budget;
  const auto thresholds = th.as_thresholds();
  HittingFamily family = build_hitting_family(g, metric, sources, thresholds, FaultModel{FaultMode::Edge, f},
                                              ThresholdTest::GreaterEqual, hopt);

  EftSourcewiseResult res{Subgraph(g), th, family};
  res.depth = depth;
  res.hitting_verified = family.verified || thresholds.empty();

  for (std::size_t i = 1; i <= f; ++i) {
    if (family.sets[i].empty()) continue;
    auto sub = build(g, metric, family.sets[i], f - i, options, depth + 1);
    res.h.merge(sub.h);
    res.depth = std::max(res.depth, sub.depth);
    res.hitting_verified = res.hitting_verified && sub.hitting_verified;
  }

  struct Out {
    std::set<EdgeId> near;
    std::size_t sequences = 0, bound = 0;
  };
  std::vector<Out> outs(sources.size());
  parallel_for(sources.size(), [&](std::size_t j) {
    FaultTreeCache cache(g, metric, sources[j]);
    for (Vertex t = 0; t < g.n(); ++t) {
      auto gen = generate_near_sets(g, metric, sources[j], t, th, &cache);
      outs[j].near.insert(gen.near_edges.begin(), gen.near_edges.end());
      outs[j].sequences += gen.sequences;
      outs[j].bound += gen.sequence_bound;
    }
  });
  std::set<EdgeId> near;
  for (const auto& o : outs) {
    near.insert(o.near.begin(), o.near.end());
    res.sequences += o.sequences;
    res.sequence_bound += o.bound;
  }
  res.near_edges = near.size();
  for (EdgeId e : near) res.h.insert(e);
  return res;
}

}  // namespace eft_detail

// f-EFT S x V distance preserver for unweighted graphs:
// H = H_1 u ... u H_f u E_near with H_i an (f - i)-EFT A_i x V preserver.
inline EftSourcewiseResult build_feft_sourcewise(const ColoredGraph& g, const TieBrokenMetric& metric,
                                                 std::span<const Vertex> sources, std::size_t f,
                                                 const EftSourcewiseOptions& options = {}) {
  if (!g.unit_weight()) throw InvalidArgument("f-EFT sourcewise preserver needs an unweighted graph");
  check_sources(g, sources);
  std::vector<Vertex> s0(sources.begin(), sources.end());
  std::sort(s0.begin(), s0.end());
  s0.erase(std::unique(s0.begin(), s0.end()), s0.end());
  return eft_detail::build(g, metric, std::move(s0), f, options, 0);
}

}  // namespace cftg
