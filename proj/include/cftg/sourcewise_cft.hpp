#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cftg/error.hpp"
#include "cftg/graph.hpp"
#include "cftg/hitting.hpp"
#include "cftg/metric.hpp"
#include "cftg/parallel.hpp"

namespace cftg {

namespace threshold_detail {

// Clamp to [1, n] and snap values within rounding noise of an integer, so
// that e.g. 64^(1/3) yields exactly 4.
inline double clean(double d, Vertex n) {
  const double r = std::round(d);
  if (std::abs(d - r) <= 1e-9 * std::max(1.0, std::abs(d))) d = r;
  return std::clamp(d, 1.0, static_cast<double>(std::max<Vertex>(1, n)));
}

inline std::size_t ceil_len(double d) { return static_cast<std::size_t>(std::ceil(d)); }

}  // namespace threshold_detail

// d_0 = inf > d_1 > ... > d_k, with k <= delta after collapsing levels whose
// rounded suffix length repeats.
struct ThresholdSchedule {
  std::size_t delta = 0;
  double base = 0.0;
  std::vector<double> thresholds;          // d_1..d_k
  std::vector<std::size_t> suffix;         // ceil(d_1)..ceil(d_k)
  std::vector<std::size_t> next_suffix;    // per level 0..k: ceil(d_{i+1}) used by R2
  bool collapsed = false;

  [[nodiscard]] std::size_t levels() const noexcept { return thresholds.size() + 1; }
  [[nodiscard]] std::vector<Threshold> as_thresholds() const {
    std::vector<Threshold> out;
    for (std::size_t i = 0; i < thresholds.size(); ++i) out.push_back({thresholds[i], suffix[i]});
    return out;
  }
};

inline ThresholdSchedule cft_thresholds_from_base(double base, std::size_t delta, Vertex n) {
  using namespace threshold_detail;
  ThresholdSchedule s;
  s.delta = delta;
  s.base = base;
  const double b = std::max(base, 1e-300);
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 1; i <= delta; ++i) {
    const double d = clean(std::pow(b, 1.0 - static_cast<double>(i) / static_cast<double>(delta + 1)), n);
    const std::size_t len = ceil_len(d);
    if (len >= prev) {
      s.collapsed = true;
      break;
    }
    s.thresholds.push_back(d);
    s.suffix.push_back(len);
    prev = len;
  }
  for (std::size_t i = 0; i + 1 < s.levels(); ++i) s.next_suffix.push_back(s.suffix[i]);
  // After a collapse the last level repeats its own length; otherwise the
  // schedule ends with d_{delta+1} = 1.
  s.next_suffix.push_back(s.collapsed ? s.suffix.back() : 1);
  return s;
}

// base = (n / sigma) ln n.
inline ThresholdSchedule cft_thresholds(Vertex n, std::size_t sigma, std::size_t delta) {
  if (n < 2 || sigma < 1 || sigma > static_cast<std::size_t>(n)) throw InvalidArgument("need n >= 2 and 1 <= sigma <= n");
  const double base = static_cast<double>(n) / static_cast<double>(sigma) * std::log(static_cast<double>(n));
  return cft_thresholds_from_base(base, delta, n);
}

struct CftSourcewiseOptions {
  HittingMode hitting = HittingMode::Greedy;
  std::uint64_t seed = 0;
  std::optional<double> threshold_base;  // replaces (n / sigma) ln n
};

struct CftSourcewiseResult {
  Subgraph h;
  ThresholdSchedule schedule;
  HittingFamily hitting;
  std::size_t r1_additions = 0;
  std::size_t r2_additions = 0;
  std::size_t size_bound = 0;  // sum over t, i of |A_i| (1 + ceil(d_{i+1}))
};

inline void check_sources(const ColoredGraph& g, std::span<const Vertex> sources) {
  if (sources.empty()) throw InvalidArgument("source set is empty");
  for (Vertex s : sources) {
    if (s < 0 || s >= g.n()) throw InvalidArgument("source " + std::to_string(s) + " out of range");
  }
}

// 1-CFT S x V distance preserver for unweighted graphs.
inline CftSourcewiseResult build_1cft_sourcewise(const ColoredGraph& g, const TieBrokenMetric& metric,
                                                 std::span<const Vertex> sources,
                                                 const CftSourcewiseOptions& options = {}) {
  if (!g.unit_weight()) throw InvalidArgument("1-CFT sourcewise preserver needs an unweighted graph");
  check_sources(g, sources);
  std::vector<Vertex> s0(sources.begin(), sources.end());
  std::sort(s0.begin(), s0.end());
  s0.erase(std::unique(s0.begin(), s0.end()), s0.end());

  const ThresholdSchedule schedule =
      options.threshold_base
          ? cft_thresholds_from_base(*options.threshold_base, g.delta(), g.n())
          : cft_thresholds(std::max<Vertex>(2, g.n()), std::min<std::size_t>(s0.size(), std::max<Vertex>(2, g.n())),
                           g.delta());
  const auto thresholds = schedule.as_thresholds();
  HittingOptions hopt;
  hopt.mode = options.hitting;
  hopt.seed = options.seed;
  HittingFamily family =
      build_hitting_family(g, metric, s0, thresholds, FaultModel{FaultMode::Color, 1}, ThresholdTest::Greater, hopt);

  struct Job {
    std::size_t level;
    Vertex a;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < family.sets.size(); ++i) {
    for (Vertex a : family.sets[i]) jobs.push_back({i, a});
  }
  struct Out {
    std::vector<EdgeId> edges;
    std::size_t r1 = 0, r2 = 0;
  };
  std::vector<Out> outs(jobs.size());

  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [level, a] = jobs[j];
    auto& out = outs[j];
    ShortestPathTree tree(g, metric, a);
    std::map<ColorId, std::vector<Vertex>> wanted;
    for (Vertex t = 0; t < g.n(); ++t) {
      auto e = tree.last_edge(t);
      if (!e) continue;
      out.edges.push_back(*e);  // R1
      ++out.r1;
      std::vector<ColorId> seen;
      for (EdgeId x : tree.suffix_edges(t, schedule.next_suffix[level])) {
        const ColorId c = g.edge(x).color;
        if (c != kNoColor && std::find(seen.begin(), seen.end(), c) == seen.end()) {
          seen.push_back(c);
          wanted[c].push_back(t);
        }
      }
    }
    for (const auto& [c, targets] : wanted) {  // R2
      const EdgeMask live = apply_fault(g, FaultSet::colors({c}));
      ShortestPathTree faulted(g, metric, a, &live);
      for (Vertex t : targets) {
        if (auto e = faulted.last_edge(t)) {
          out.edges.push_back(*e);
          ++out.r2;
        }
      }
    }
  });

  CftSourcewiseResult res{Subgraph(g), schedule, std::move(family)};
  for (const auto& out : outs) {
    res.h.insert_all(out.edges);
    res.r1_additions += out.r1;
    res.r2_additions += out.r2;
  }
  for (std::size_t i = 0; i < res.hitting.sets.size(); ++i) {
    res.size_bound += static_cast<std::size_t>(g.n()) * res.hitting.sets[i].size() * (1 + schedule.next_suffix[i]);
  }
  return res;
}

}  // namespace cftg
