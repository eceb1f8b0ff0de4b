#pragma once

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cftg/cftg.hpp"
#include "cftg/random_graphs.hpp"

namespace cftg::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kBadConfig = 2, kCapped = 3, kInternal = 4 };

struct RunConfig {
  std::string command;  // build | gen | verify | bench
  std::string kind;
  std::vector<std::string> paths;  // positional
  std::optional<std::string> manifest;
  std::optional<std::string> csv;

  std::vector<Vertex> sources;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::size_t f = 1;
  std::size_t delta = 1;
  std::size_t sigma = 1;
  std::size_t q = 2;
  int lambda = 1;
  Vertex n = 0;
  std::size_t extra = 0;
  std::int64_t max_weight = 1;
  bool directed = false;
  double uncolored = 0.0;
  std::string mode = "color";
  std::int64_t stretch = 2;
  std::uint64_t seed = 0;
  bool verify = false;
  std::size_t cap = 10'000'000;

  std::vector<Vertex> grid_n{128, 256, 512, 1024};
  std::vector<std::size_t> grid_sigma{1};
  std::vector<std::size_t> grid_delta{1};
  std::size_t seeds = 1;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha-256 failed");
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(md[i]);
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << bytes;
}

// "1-4,2-7"
inline std::vector<std::pair<Vertex, Vertex>> parse_pairs(const std::string& text) {
  std::vector<std::pair<Vertex, Vertex>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw ConfigError("pair '" + item + "' is not of the form a-b");
    try {
      out.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
    } catch (const std::exception&) {
      throw ConfigError("pair '" + item + "' is not of the form a-b");
    }
  }
  return out;
}

inline FaultMode parse_mode(const std::string& m) {
  if (m == "color") return FaultMode::Color;
  if (m == "edge") return FaultMode::Edge;
  throw ConfigError("mode must be color or edge");
}

namespace cli_detail {

struct LoadedGraph {
  ColoredGraph g;
  std::string digest;
};

inline LoadedGraph load_graph(const std::string& path) {
  const auto bytes = read_file(path);
  return {parse_graph(bytes), sha256_hex(bytes)};
}

inline void need_paths(const RunConfig& c, std::size_t k, const char* usage) {
  if (c.paths.size() != k) throw ConfigError(c.command + " expects " + usage);
}

inline void emit_report(const RunConfig& c, const VerificationReport& rep, const ColoredGraph& g, std::ostream& out) {
  if (c.csv) {
    std::ostringstream buf;
    write_report_csv(buf, rep, g);
    write_file(*c.csv, buf.str());
  } else {
    write_report_csv(out, rep, g);
  }
}

inline int report_status(const VerificationReport& rep) {
  switch (rep.verdict) {
    case Verdict::Pass: return kOk;
    case Verdict::Fail: return kVerifyFailed;
    case Verdict::Inconclusive: return kCapped;
  }
  return kVerifyFailed;
}

inline PairSet pair_set(const RunConfig& c, const ColoredGraph& g) {
  if (c.pairs.empty()) throw ConfigError("--pairs is required");
  return PairSet(c.pairs, g.n());
}

struct Built {
  Subgraph h;
  std::vector<std::pair<std::string, std::string>> stats;
};

inline Built build_kind(const RunConfig& c, const ColoredGraph& g) {
  const auto metric0 = perturb_weights(g, c.seed);
  auto stat = [](auto v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  if (c.kind == "cft-sourcewise") {
    if (c.sources.empty()) throw ConfigError("--sources is required");
    CftSourcewiseOptions opt;
    opt.seed = c.seed;
    auto res = with_reseeding(g, metric0, [&](const TieBrokenMetric& m) { return build_1cft_sourcewise(g, m, c.sources, opt); });
    return {res.h,
            {{"hitting_sets", stat(res.hitting.sets.size())},
             {"r1_additions", stat(res.r1_additions)},
             {"r2_additions", stat(res.r2_additions)},
             {"size_bound", stat(res.size_bound)}}};
  }
  if (c.kind == "eft-sourcewise") {
    if (c.sources.empty()) throw ConfigError("--sources is required");
    EftSourcewiseOptions opt;
    opt.seed = c.seed;
    auto res = with_reseeding(g, metric0,
                              [&](const TieBrokenMetric& m) { return build_feft_sourcewise(g, m, c.sources, c.f, opt); });
    return {res.h,
            {{"near_edges", stat(res.near_edges)},
             {"sequences", stat(res.sequences)},
             {"sequence_bound", stat(res.sequence_bound)},
             {"depth", stat(res.depth)}}};
  }
  if (c.kind == "pairwise") {
    const auto pairs = pair_set(c, g);
    PairwiseOptions opt;
    opt.seed = c.seed;
    auto res = with_reseeding(g, metric0, [&](const TieBrokenMetric& m) { return build_1cft_pairwise(g, m, pairs, opt); });
    return {res.h,
            {{"hitting", stat(res.hitting.size())},
             {"long_triplets", stat(res.long_triplets)},
             {"short_triplets", stat(res.short_triplets)},
             {"reseeds", stat(res.reseeds)}}};
  }
  if (c.kind == "spanner") {
    auto res = with_reseeding(g, metric0, [&](const TieBrokenMetric& m) { return build_1cft_plus2_spanner(g, m); });
    return {res.h,
            {{"ell", stat(res.ell)},
             {"colorful", stat(res.colorful.size())},
             {"hitting", stat(res.hitting.size())},
             {"dull_edges", stat(res.dull_edges)},
             {"source_edges", stat(res.source_edges)}}};
  }
  if (c.kind == "single-pair") {
    if (c.pairs.size() != 1) throw ConfigError("single-pair needs exactly one pair in --pairs");
    const auto [s, t] = c.pairs.front();
    auto res = with_reseeding(g, metric0, [&](const TieBrokenMetric& m) { return build_1cft_single_pair(g, m, s, t); });
    return {res.h,
            {{"tree_edges", stat(res.tree_edges)},
             {"interleaving_edges", stat(res.interleaving_edges)},
             {"dp_edges", stat(res.dp_edges)},
             {"path_colors", stat(res.path_colors)}}};
  }
  throw ConfigError("unknown build kind '" + c.kind + "'");
}

inline VerificationReport verify_kind(const RunConfig& c, const std::string& kind, const ColoredGraph& g,
                                      const Subgraph& h) {
  const VerifyOptions opt{.cap = c.cap};
  const auto mode = parse_mode(c.mode);
  if (kind == "distance") {
    if (!c.pairs.empty()) return verify_distance_preserver(g, h, PairSet(c.pairs, g.n()), c.f, mode, opt);
    if (c.sources.empty()) throw ConfigError("distance verification needs --sources or --pairs");
    for (Vertex s : c.sources) {
      if (s < 0 || s >= g.n()) throw ConfigError("source out of range");
    }
    return verify_distance_preserver(g, h, sourcewise_demands(g, c.sources), c.f, mode, opt);
  }
  if (kind == "spanner") return verify_additive_spanner(g, h, c.stretch, c.f, mode, nullptr, opt);
  if (kind == "reachability" || kind == "flow") {
    if (c.sources.size() != 1) throw ConfigError(kind + " verification needs exactly one source");
    const Vertex s = c.sources.front();
    if (s < 0 || s >= g.n()) throw ConfigError("source out of range");
    if (kind == "reachability") return verify_reachability_preserver(g, h, s, c.f, mode, opt);
    if (c.lambda < 1) throw ConfigError("--lambda must be at least 1");
    return verify_flow_preserver(g, h, s, c.f, c.lambda, mode, opt);
  }
  throw ConfigError("unknown verify kind '" + kind + "'");
}

// The verification a build kind promises.
inline RunConfig verify_config_for(const RunConfig& c, std::string& kind) {
  RunConfig v = c;
  kind = "distance";
  if (c.kind == "cft-sourcewise") {
    v.f = 1;
    v.mode = "color";
  } else if (c.kind == "eft-sourcewise") {
    v.mode = "edge";
  } else if (c.kind == "pairwise" || c.kind == "single-pair") {
    v.f = 1;
    v.mode = "color";
    v.sources.clear();
  } else {
    kind = "spanner";
    v.f = 1;
    v.mode = "color";
    v.stretch = 2;
  }
  return v;
}

inline int cmd_build(const RunConfig& c, std::ostream& out) {
  need_paths(c, 2, "<graph.cftg> <out.edges>");
  const auto [g, digest] = load_graph(c.paths[0]);
  const auto built = build_kind(c, g);
  std::ostringstream buf;
  write_subgraph(buf, built.h, digest);
  write_file(c.paths[1], buf.str());
  out << "kind=" << c.kind << "\nn=" << g.n() << "\nm=" << g.m() << "\ndelta=" << g.delta()
      << "\nedges_h=" << built.h.size() << '\n';
  for (const auto& [k, v] : built.stats) out << k << '=' << v << '\n';
  if (!c.verify) return kOk;
  std::string kind;
  const auto vc = verify_config_for(c, kind);
  const auto rep = verify_kind(vc, kind, g, built.h);
  out << "verdict=" << verdict_name(rep.verdict) << '\n';
  if (c.csv) emit_report(c, rep, g, out);
  return report_status(rep);
}

inline int cmd_gen(const RunConfig& c, std::ostream& out) {
  need_paths(c, 1, "<out.cftg>");
  const std::string& path = c.paths[0];
  auto save_graph = [&](const ColoredGraph& g) {
    write_file(path, to_text(g));
    out << "n=" << g.n() << "\nm=" << g.m() << "\ndelta=" << g.delta() << '\n';
  };
  auto save_instance = [&](const LowerBoundInstance& inst) {
    save_graph(inst.graph);
    std::ostringstream buf;
    write_manifest(buf, inst);
    write_file(c.manifest.value_or(path + ".manifest"), buf.str());
    out << "mandatory=" << inst.mandatory.size() << "\nexpected_mandatory=" << inst.expected_mandatory << '\n';
  };
  if (c.kind == "random") {
    if (c.n < 2) throw ConfigError("--n must be at least 2");
    random_graphs::Rng rng(c.seed);
    auto b = random_graphs::connected(c.n, c.extra, c.directed, rng);
    random_graphs::color_randomly(b, c.delta, c.uncolored, rng);
    if (c.max_weight > 1) random_graphs::weigh_randomly(b, c.max_weight, rng);
    save_graph(b.build());
  } else if (c.kind == "sourcewise-lb") {
    save_instance(build_sourcewise_lb(c.sigma, c.delta, static_cast<std::size_t>(c.n)));
  } else if (c.kind == "reachability-lb") {
    save_instance(build_reachability_lb(static_cast<std::size_t>(c.n), c.delta, c.f));
  } else if (c.kind == "flow-lb") {
    save_instance(build_flow_lb(static_cast<std::size_t>(c.n), c.delta, c.f, c.lambda));
  } else if (c.kind == "tree-dq" || c.kind == "tree-binary") {
    const auto t = c.kind == "tree-dq" ? build_tree_T_dq(c.delta, c.q) : build_tree_binary(c.delta);
    save_graph(t.graph);
    const auto rep = verify_tree_properties(t);
    out << "root=" << t.root << "\nleaves=" << t.leaves.size() << "\nproperties=" << verdict_name(rep.verdict) << '\n';
  } else {
    throw ConfigError("unknown gen kind '" + c.kind + "'");
  }
  return kOk;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
  if (c.kind == "mandatory") {
    need_paths(c, 2, "<graph.cftg> <instance.manifest>");
    const auto [g, digest] = load_graph(c.paths[0]);
    std::istringstream in(read_file(c.paths[1]));
    auto inst = read_manifest(in, g);
    inst.graph = g;
    const auto rep = verify_mandatory_edges(inst);
    emit_report(c, rep, inst.graph, out);
    return report_status(rep);
  }
  need_paths(c, 2, "<graph.cftg> <h.edges>");
  const auto [g, digest] = load_graph(c.paths[0]);
  std::istringstream in(read_file(c.paths[1]));
  const auto h = load_subgraph(parse_subgraph(in), g, digest);
  const auto rep = verify_kind(c, c.kind, g, h);
  emit_report(c, rep, g, out);
  return report_status(rep);
}

struct BenchRow {
  Vertex n = 0;
  std::size_t sigma = 0;
  std::size_t delta = 0;
  std::uint64_t seed = 0;
  EdgeId m_g = 0;
  std::size_t m_h = 0;
  double ratio = 0.0;
};

// |E(H)| / (n^{2 - 1/(delta+1)} sigma^{1/(delta+1)} delta ln n)
inline double bench_ratio(std::size_t edges, Vertex n, std::size_t sigma, std::size_t delta) {
  const double k = 1.0 / static_cast<double>(delta + 1);
  const double dn = static_cast<double>(n);
  return static_cast<double>(edges) /
         (std::pow(dn, 2.0 - k) * std::pow(static_cast<double>(sigma), k) * static_cast<double>(delta) * std::log(dn));
}

inline std::vector<BenchRow> bench_rows(const RunConfig& c) {
  if (c.kind != "cft-sourcewise") throw ConfigError("bench supports --kind cft-sourcewise");
  std::vector<BenchRow> cells;
  for (Vertex n : c.grid_n) {
    for (std::size_t sigma : c.grid_sigma) {
      for (std::size_t delta : c.grid_delta) {
        if (n < 4 || sigma < 1 || sigma > static_cast<std::size_t>(n) || delta < 1) {
          throw ConfigError("bench grid needs n >= 4, 1 <= sigma <= n, delta >= 1");
        }
        for (std::size_t k = 0; k < c.seeds; ++k) cells.push_back({n, sigma, delta, c.seed + k, 0, 0, 0.0});
      }
    }
  }
  parallel_for(cells.size(), [&](std::size_t i) {
    auto& row = cells[i];
    random_graphs::Rng rng(row.seed * 1'000'003 + static_cast<std::uint64_t>(row.n));
    const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(row.n))));
    auto b = random_graphs::connected(row.n, static_cast<std::size_t>(row.n) * root / 2, false, rng);
    random_graphs::color_randomly(b, row.delta, 0.0, rng);
    const auto g = b.build();
    const auto sources = random_graphs::sample_sources(g.n(), row.sigma, rng);
    CftSourcewiseOptions opt;
    opt.seed = row.seed;
    const auto res = with_reseeding(g, TieBrokenMetric(g, row.seed),
                                    [&](const TieBrokenMetric& m) { return build_1cft_sourcewise(g, m, sources, opt); });
    row.m_g = g.m();
    row.m_h = res.h.size();
    row.ratio = bench_ratio(row.m_h, row.n, row.sigma, row.delta);
  });
  std::sort(cells.begin(), cells.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.n, a.sigma, a.delta, a.seed) < std::tie(b.n, b.sigma, b.delta, b.seed);
  });
  return cells;
}

inline int cmd_bench(const RunConfig& c, std::ostream& out) {
  const auto rows = bench_rows(c);
  std::ostringstream buf;
  buf << "n,sigma,delta,f,seed,edges_g,edges_h,ratio\n";
  for (const auto& r : rows) {
    buf << r.n << ',' << r.sigma << ',' << r.delta << ",1," << r.seed << ',' << r.m_g << ',' << r.m_h << ','
        << std::fixed << std::setprecision(6) << r.ratio << '\n';
  }
  if (c.csv) {
    write_file(*c.csv, buf.str());
  } else {
    out << buf.str();
  }
  return kOk;
}

}  // namespace cli_detail

inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  try {
    if (config.command == "build") return cmd_build(config, out);
    if (config.command == "gen") return cmd_gen(config, out);
    if (config.command == "verify") return cmd_verify(config, out);
    if (config.command == "bench") return cmd_bench(config, out);
    throw ConfigError("unknown command '" + config.command + "'");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
}

// Fills config from argv; returns an exit code when parsing ends the run
// (help or bad flags).
inline std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& c, std::ostream& out,
                                     std::ostream& err) {
  CLI::App app{"colored fault-tolerant preservers and spanners"};
  app.require_subcommand(1);
  std::string sources;
  std::string pairs;
  std::string grid_n;
  std::string grid_sigma;
  std::string grid_delta;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--kind", c.kind)->required();
    sub->add_option("--seed", c.seed);
    sub->add_option("--csv", c.csv);
  };
  auto* build = app.add_subcommand("build", "build a subgraph of a cftg graph");
  common(build);
  build->add_option("--sources", sources, "comma separated");
  build->add_option("--pairs", pairs, "a-b,c-d");
  build->add_option("--f", c.f);
  build->add_flag("--verify", c.verify);
  build->add_option("paths", c.paths)->expected(2);

  auto* gen = app.add_subcommand("gen", "generate a graph or lower-bound instance");
  common(gen);
  gen->add_option("--n", c.n);
  gen->add_option("--extra", c.extra);
  gen->add_option("--delta", c.delta);
  gen->add_option("--sigma", c.sigma);
  gen->add_option("--q", c.q);
  gen->add_option("--f", c.f);
  gen->add_option("--lambda", c.lambda);
  gen->add_option("--max-weight", c.max_weight);
  gen->add_option("--uncolored", c.uncolored);
  gen->add_flag("--directed", c.directed);
  gen->add_option("--manifest", c.manifest);
  gen->add_option("paths", c.paths)->expected(1);

  auto* verify = app.add_subcommand("verify", "check a subgraph against the fault oracle");
  common(verify);
  verify->add_option("--sources", sources);
  verify->add_option("--pairs", pairs);
  verify->add_option("--f", c.f);
  verify->add_option("--mode", c.mode);
  verify->add_option("--lambda", c.lambda);
  verify->add_option("--stretch", c.stretch);
  verify->add_option("--cap", c.cap);
  verify->add_option("paths", c.paths)->expected(2);

  auto* bench = app.add_subcommand("bench", "size sweep over a parameter grid");
  common(bench);
  bench->add_option("--n", grid_n, "comma separated");
  bench->add_option("--sigma", grid_sigma);
  bench->add_option("--delta", grid_delta);
  bench->add_option("--seeds", c.seeds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadConfig;
  }
  for (auto* sub : {build, gen, verify, bench}) {
    if (sub->parsed()) c.command = sub->get_name();
  }
  auto split = [](const std::string& text, auto& dst) {
    using T = typename std::decay_t<decltype(dst)>::value_type;
    dst.clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) dst.push_back(static_cast<T>(std::stoll(item)));
  };
  try {
    if (!sources.empty()) split(sources, c.sources);
    if (!pairs.empty()) c.pairs = parse_pairs(pairs);
    if (!grid_n.empty()) split(grid_n, c.grid_n);
    if (!grid_sigma.empty()) split(grid_sigma, c.grid_sigma);
    if (!grid_delta.empty()) split(grid_delta, c.grid_delta);
  } catch (const std::exception& e) {
    err << "error: bad list argument: " << e.what() << '\n';
    return kBadConfig;
  }
  return std::nullopt;
}

}  // namespace cftg::cli
