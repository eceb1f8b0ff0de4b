#pragma once

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cftg/error.hpp"
#include "cftg/graph.hpp"

namespace cftg {

namespace io_detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string_view strip_comment(std::string_view s) {
  const auto h = s.find('#');
  return trim(h == std::string_view::npos ? s : s.substr(0, h));
}

inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

}  // namespace io_detail

// "<int>" or "<int>/<int>".
inline std::optional<Weight> parse_weight(std::string_view s) {
  using io_detail::parse_int;
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    auto v = parse_int<std::int64_t>(s);
    if (!v) return std::nullopt;
    return Weight(*v);
  }
  auto p = parse_int<std::int64_t>(s.substr(0, slash));
  auto q = parse_int<std::int64_t>(s.substr(slash + 1));
  if (!p || !q || *q == 0) return std::nullopt;
  return Weight(*p, *q);
}

inline std::string format_weight(const Weight& w) {
  if (w.denominator() == 1) return std::to_string(w.numerator());
  return std::to_string(w.numerator()) + "/" + std::to_string(w.denominator());
}

// Reads the line-based cftg format:
//   cftg 1
//   n <N>
//   directed <0|1>
//   weighted <0|1>
//   e <tail> <head> <weight> <color|->
// '#' starts a comment; blank lines are skipped.
inline ColoredGraph parse_graph(std::istream& in) {
  using namespace io_detail;
  std::string raw;
  std::size_t lineno = 0;
  bool have_magic = false;
  std::optional<Vertex> n;
  std::optional<bool> directed;
  std::optional<bool> weighted;
  std::optional<GraphBuilder> builder;

  auto flag = [&](std::string_view tok) -> bool {
    if (tok == "0") return false;
    if (tok == "1") return true;
    throw ParseError(lineno, "expected 0 or 1, got '" + std::string(tok) + "'");
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    const auto tok = tokens(line);
    if (!have_magic) {
      if (tok.size() != 2 || tok[0] != "cftg" || tok[1] != "1") throw ParseError(lineno, "expected header 'cftg 1'");
      have_magic = true;
      continue;
    }
    if (tok[0] == "n" || tok[0] == "directed" || tok[0] == "weighted") {
      if (builder) throw ParseError(lineno, "header key after first edge");
      if (tok.size() != 2) throw ParseError(lineno, "expected '" + std::string(tok[0]) + " <value>'");
      if (tok[0] == "n") {
        auto v = parse_int<Vertex>(tok[1]);
        if (!v || *v < 0) throw ParseError(lineno, "invalid vertex count");
        n = *v;
      } else if (tok[0] == "directed") {
        directed = flag(tok[1]);
      } else {
        weighted = flag(tok[1]);
      }
      continue;
    }
    if (tok[0] != "e") throw ParseError(lineno, "unknown record '" + std::string(tok[0]) + "'");
    if (!n || !directed || !weighted) throw ParseError(lineno, "edge before complete header (n, directed, weighted)");
    if (!builder) builder.emplace(*n, *directed);
    if (tok.size() != 5) throw ParseError(lineno, "expected 'e <tail> <head> <weight> <color|->'");
    auto tail = parse_int<Vertex>(tok[1]);
    auto head = parse_int<Vertex>(tok[2]);
    if (!tail || !head) throw ParseError(lineno, "invalid endpoint");
    if (*tail < 0 || *tail >= *n || *head < 0 || *head >= *n) {
      throw ParseError(lineno, "endpoint out of range [0, " + std::to_string(*n) + ")");
    }
    auto w = parse_weight(tok[3]);
    if (!w) throw ParseError(lineno, "invalid weight '" + std::string(tok[3]) + "'");
    if (*w <= Weight(0)) throw ParseError(lineno, "non-positive weight");
    if (!*weighted && *w != Weight(1)) throw ParseError(lineno, "weight other than 1 in unweighted graph");
    const ColorId c = tok[4] == "-" ? kNoColor : builder->color(tok[4]);
    builder->add_edge(*tail, *head, *w, c);
  }
  if (!have_magic) throw ParseError(lineno, "empty input");
  if (!n || !directed || !weighted) throw ParseError(lineno, "incomplete header");
  if (!builder) builder.emplace(*n, *directed);
  return builder->build();
}

inline ColoredGraph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_graph(in);
}

inline void write_graph(std::ostream& out, const ColoredGraph& g) {
  out << "cftg 1\n"
      << "n " << g.n() << "\n"
      << "directed " << (g.directed() ? 1 : 0) << "\n"
      << "weighted " << (g.unit_weight() ? 0 : 1) << "\n";
  for (const auto& e : g.edges()) {
    out << "e " << e.tail << ' ' << e.head << ' ' << format_weight(e.weight) << ' '
        << (e.color == kNoColor ? std::string("-") : g.color_name(e.color)) << '\n';
  }
}

inline std::string to_text(const ColoredGraph& g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

// Subgraph file: header "cfth 1 parent=<digest>" then sorted edge ids.
inline void write_subgraph(std::ostream& out, const Subgraph& h, std::string_view parent_digest) {
  out << "cfth 1 parent=" << parent_digest << '\n';
  for (EdgeId e : h.edge_ids()) out << e << '\n';
}

struct SubgraphFile {
  std::string parent_digest;
  std::vector<EdgeId> edge_ids;
};

inline SubgraphFile parse_subgraph(std::istream& in) {
  using namespace io_detail;
  SubgraphFile f;
  std::string raw;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    if (!have_header) {
      const auto tok = tokens(line);
      if (tok.size() != 3 || tok[0] != "cfth" || tok[1] != "1" || !tok[2].starts_with("parent=")) {
        throw ParseError(lineno, "expected header 'cfth 1 parent=<digest>'");
      }
      f.parent_digest = std::string(tok[2].substr(7));
      have_header = true;
      continue;
    }
    auto e = parse_int<EdgeId>(line);
    if (!e || *e < 0) throw ParseError(lineno, "invalid edge id");
    f.edge_ids.push_back(*e);
  }
  if (!have_header) throw ParseError(lineno, "empty subgraph file");
  return f;
}

// Resolves a parsed subgraph file against its parent. A non-empty
// expected_digest must match the recorded parent digest.
inline Subgraph load_subgraph(const SubgraphFile& f, const ColoredGraph& parent, std::string_view expected_digest = {}) {
  if (!expected_digest.empty() && f.parent_digest != expected_digest) {
    throw InvalidArgument("subgraph was built from a different parent graph");
  }
  Subgraph h(parent);
  for (EdgeId e : f.edge_ids) {
    if (e >= parent.m()) throw InvalidArgument("edge id " + std::to_string(e) + " not in parent graph");
    h.insert(e);
  }
  return h;
}

}  // namespace cftg
