// Copyright 2026 The tdsp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TDSP_IO_HPP
#define TDSP_IO_HPP

#include <iomanip>
#include <sstream>

#include "tdsp/shortcuts.hpp"

namespace tdsp {
namespace detail {

inline std::string format_cost(double c) {
  if (c == kInf) return "inf";
  return format_double(c);
}

inline bool parse_cost(const std::string& tok, double& out) {
  if (tok == "inf") {
    out = kInf;
    return true;
  }
  return parse_double(tok, out);
}

inline void write_plf(const PLF& f, std::ostream& os) {
  os << "F " << f.size();
  for (const auto& p : f.points())
    os << ' ' << format_double(p.t) << ' ' << format_cost(p.c);
  if (f.has_via()) {
    os << " P";
    for (Vertex v : f.via()) os << ' ' << v;
  } else {
    os << " N";
  }
  os << '\n';
}

inline PLF parse_plf(const std::vector<std::string>& toks, std::size_t from,
                     long line_no) {
  long k = 0;
  if (toks.size() < from + 2 || toks[from] != "F" || !parse_int(toks[from + 1], k) ||
      k < 1)
    throw ParseError("malformed function record", line_no);
  std::size_t need = from + 2 + 2 * k + 1;
  if (toks.size() < need) throw ParseError("truncated function record", line_no);
  std::vector<Breakpoint> pts;
  pts.reserve(k);
  for (long i = 0; i < k; ++i) {
    double t = 0, c = 0;
    if (!parse_double(toks[from + 2 + 2 * i], t) ||
        !parse_cost(toks[from + 3 + 2 * i], c))
      throw ParseError("malformed function breakpoint", line_no);
    pts.push_back({t, c});
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::isnan(pts[i].t) || std::isnan(pts[i].c) || pts[i].c < 0.0)
      throw ParseError("invalid function breakpoint", line_no);
    if (std::isinf(pts[i].c) && pts.size() > 1)
      throw ParseError("infinite cost in a multi-point function", line_no);
    if (i > 0 && pts[i - 1].t >= pts[i].t)
      throw ParseError("function times not strictly increasing", line_no);
  }
  std::size_t tag = from + 2 + 2 * k;
  if (toks[tag] == "N") {
    if (toks.size() != tag + 1) throw ParseError("trailing tokens", line_no);
    // Stored functions are kernel outputs; skip the strict slope re-check
    // so rounding noise cannot reject a legitimate dump.
    return PLF::trusted(std::move(pts), {}, false);
  }
  if (toks[tag] != "P") throw ParseError("bad provenance tag", line_no);
  if (toks.size() != tag + static_cast<std::size_t>(k))
    throw ParseError("provenance count mismatch", line_no);
  std::vector<Vertex> via;
  via.reserve(k - 1);
  for (long i = 0; i < k - 1; ++i) {
    long v = 0;
    if (!parse_int(toks[tag + 1 + i], v))
      throw ParseError("malformed provenance entry", line_no);
    via.push_back(static_cast<Vertex>(v));
  }
  if (pts.size() == 1) return PLF::trusted(std::move(pts), {}, true);
  return PLF::trusted(std::move(pts), std::move(via), true);
}

inline std::string fingerprint_hex(std::uint64_t fp) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fp;
  return os.str();
}

inline bool parse_fingerprint(const std::string& tok, std::uint64_t& out) {
  if (tok.size() != 16) return false;
  out = 0;
  for (char ch : tok) {
    int d;
    if (ch >= '0' && ch <= '9')
      d = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      d = ch - 'a' + 10;
    else
      return false;
    out = (out << 4) | d;
  }
  return true;
}

}  // namespace detail

/// Index dump: versioned header, the raw graph in its canonical form, then
/// one node record per vertex followed by its stored weight functions.
/// Round-tripping reproduces identical query answers.
inline void write_index(const TreeDecomposition& tree, std::ostream& os) {
  os << "tdsp-index 1\n";
  write_graph(tree.graph(), os);
  os << "r " << tree.root() << '\n';
  for (Vertex v = 1; v <= tree.n(); ++v) {
    const TreeNode& node = tree.node(v);
    os << "n " << v << ' ' << node.order << ' ' << node.parent << ' '
       << node.bag.size();
    for (Vertex u : node.bag) os << ' ' << u;
    os << '\n';
    for (std::size_t k = 0; k + 1 < node.bag.size(); ++k) {
      detail::write_plf(node.ws[k], os);
      detail::write_plf(node.wd[k], os);
    }
  }
}

inline TreeDecomposition read_index(std::istream& is) {
  std::string line;
  long line_no = 0;
  auto next_tokens = [&](const char* what) {
    while (std::getline(is, line)) {
      ++line_no;
      auto toks = detail::tokens(line);
      if (toks.empty() || toks[0] == "c") continue;
      return toks;
    }
    throw ParseError(std::string("unexpected end of index, expected ") + what,
                     line_no);
  };

  auto header = next_tokens("header");
  if (header.size() != 2 || header[0] != "tdsp-index" || header[1] != "1")
    throw ParseError("not a tdsp index (version 1)", line_no);

  // Graph section: header line plus m edge lines.
  std::ostringstream graph_text;
  auto p = next_tokens("graph header");
  if (p.empty() || p[0] != "p") throw ParseError("expected graph header", line_no);
  long m = 0;
  if (p.size() != 6 || !detail::parse_int(p[3], m))
    throw ParseError("malformed graph header", line_no);
  for (const auto& t : p) graph_text << t << ' ';
  graph_text << '\n';
  for (long e = 0; e < m; ++e) {
    auto a = next_tokens("edge");
    for (const auto& t : a) graph_text << t << ' ';
    graph_text << '\n';
  }
  std::istringstream graph_is(graph_text.str());
  TDGraph graph = load_graph(graph_is);

  auto rline = next_tokens("root");
  long root = 0;
  if (rline.size() != 2 || rline[0] != "r" || !detail::parse_int(rline[1], root) ||
      root < 1 || root > graph.n())
    throw ParseError("malformed root record", line_no);

  std::vector<TreeNode> nodes(graph.n() + 1);
  std::vector<char> seen(graph.n() + 1, 0);
  for (int i = 0; i < graph.n(); ++i) {
    auto nl = next_tokens("node record");
    long owner = 0, order = 0, parent = 0, bag_size = 0;
    if (nl.size() < 5 || nl[0] != "n" || !detail::parse_int(nl[1], owner) ||
        !detail::parse_int(nl[2], order) || !detail::parse_int(nl[3], parent) ||
        !detail::parse_int(nl[4], bag_size))
      throw ParseError("malformed node record", line_no);
    if (owner < 1 || owner > graph.n() || seen[owner])
      throw ParseError("bad or duplicate node owner", line_no);
    if (bag_size < 1 || nl.size() != static_cast<std::size_t>(5 + bag_size))
      throw ParseError("node bag count mismatch", line_no);
    seen[owner] = 1;
    TreeNode& node = nodes[owner];
    node.owner = static_cast<Vertex>(owner);
    node.order = static_cast<int>(order);
    node.parent = static_cast<Vertex>(parent);
    node.bag.reserve(bag_size);
    for (long k = 0; k < bag_size; ++k) {
      long u = 0;
      if (!detail::parse_int(nl[5 + k], u) || u < 1 || u > graph.n())
        throw ParseError("bag member out of range", line_no);
      node.bag.push_back(static_cast<Vertex>(u));
    }
    if (node.bag[0] != owner) throw ParseError("bag must start with owner", line_no);
    for (long k = 0; k + 1 < bag_size; ++k) {
      node.ws.push_back(detail::parse_plf(next_tokens("weight function"), 0, line_no));
      node.wd.push_back(detail::parse_plf(next_tokens("weight function"), 0, line_no));
    }
  }
  return TreeBuilderAccess::assemble(std::move(graph), std::move(nodes),
                                     static_cast<Vertex>(root));
}

/// Selection manifest: fingerprint of the index it was built against,
/// budget and strategy, then one `s <i> <j> <weight> <utility>` line per
/// selected pair followed by its two functions.
inline void write_manifest(const CandidateSet& cands, const SelectionResult& sel,
                           const std::string& strategy, std::ostream& os) {
  os << "tdsp-manifest 1\n";
  os << "x " << detail::fingerprint_hex(cands.fingerprint) << '\n';
  os << "b " << sel.budget << ' ' << strategy << '\n';
  os << "u " << sel.total_weight << ' ' << detail::format_double(sel.total_utility)
     << '\n';
  for (std::uint32_t idx : sel.selected) {
    const PairInstance& p = cands.pairs[idx];
    os << "s " << p.i << ' ' << p.j << ' ' << p.weight << ' '
       << detail::format_double(p.utility) << '\n';
    detail::write_plf(p.up, os);
    detail::write_plf(p.down, os);
  }
}

inline ShortcutSet read_manifest(std::istream& is) {
  ShortcutSet out;
  std::string line;
  long line_no = 0;
  bool have_header = false, have_fp = false, have_budget = false;
  while (std::getline(is, line)) {
    ++line_no;
    auto toks = detail::tokens(line);
    if (toks.empty() || toks[0] == "c") continue;
    if (!have_header) {
      if (toks.size() != 2 || toks[0] != "tdsp-manifest" || toks[1] != "1")
        throw ParseError("not a tdsp manifest (version 1)", line_no);
      have_header = true;
      continue;
    }
    if (toks[0] == "x") {
      if (toks.size() != 2 || !detail::parse_fingerprint(toks[1], out.fingerprint))
        throw ParseError("malformed fingerprint", line_no);
      have_fp = true;
      continue;
    }
    if (toks[0] == "b") {
      long budget = 0;
      if (toks.size() != 3 || !detail::parse_int(toks[1], budget))
        throw ParseError("malformed budget record", line_no);
      out.budget = budget;
      out.strategy = toks[2];
      have_budget = true;
      continue;
    }
    if (toks[0] == "u") {
      long w = 0;
      double u = 0;
      if (toks.size() != 3 || !detail::parse_int(toks[1], w) ||
          !detail::parse_double(toks[2], u))
        throw ParseError("malformed totals record", line_no);
      out.total_weight = w;
      out.total_utility = u;
      continue;
    }
    if (toks[0] == "s") {
      long i = 0, j = 0;
      if (toks.size() != 5 || !detail::parse_int(toks[1], i) ||
          !detail::parse_int(toks[2], j))
        throw ParseError("malformed pair record", line_no);
      std::string l1, l2;
      if (!std::getline(is, l1) || !std::getline(is, l2))
        throw ParseError("pair record missing functions", line_no);
      line_no += 2;
      PLF up = detail::parse_plf(detail::tokens(l1), 0, line_no - 1);
      PLF down = detail::parse_plf(detail::tokens(l2), 0, line_no);
      out.fns.emplace(CandidateSet::key(static_cast<Vertex>(i), static_cast<Vertex>(j)),
                      std::make_pair(std::move(up), std::move(down)));
      continue;
    }
    throw ParseError("unknown manifest record '" + toks[0] + "'", line_no);
  }
  if (!have_header || !have_fp || !have_budget)
    throw ParseError("incomplete manifest", line_no);
  return out;
}

/// Updates file: one `a <u> <v> <k> <t> <c> ...` line per edge whose weight
/// function is to be replaced.
inline std::vector<std::tuple<Vertex, Vertex, PLF>> load_updates(std::istream& is) {
  std::vector<std::tuple<Vertex, Vertex, PLF>> ups;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto toks = detail::tokens(line);
    if (toks.empty() || toks[0] == "c") continue;
    long u = 0, v = 0, k = 0;
    if (toks[0] != "a" || toks.size() < 4 || !detail::parse_int(toks[1], u) ||
        !detail::parse_int(toks[2], v) || !detail::parse_int(toks[3], k) || k < 1 ||
        toks.size() != static_cast<std::size_t>(4 + 2 * k))
      throw ParseError("malformed update line, expected 'a <u> <v> <k> <t> <c> ...'",
                       line_no);
    std::vector<Breakpoint> pts;
    pts.reserve(k);
    for (long i = 0; i < k; ++i) {
      double t = 0, c = 0;
      if (!detail::parse_double(toks[4 + 2 * i], t) ||
          !detail::parse_double(toks[5 + 2 * i], c))
        throw ParseError("malformed update breakpoint", line_no);
      pts.push_back({t, c});
    }
    try {
      ups.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v),
                       PLF(std::move(pts)));
    } catch (const TdspError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return ups;
}

}  // namespace tdsp

#endif  // TDSP_IO_HPP
