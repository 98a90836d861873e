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

#ifndef TDSP_GRAPH_HPP
#define TDSP_GRAPH_HPP

#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tdsp/plf.hpp"

namespace tdsp {

struct Query {
  Vertex s = kNoVertex;
  Vertex d = kNoVertex;
  double t = 0.0;
};

/// Directed time-dependent graph. Vertex ids are 1..n; at most one edge per
/// ordered pair; no self loops; every edge weight is a FIFO travel cost
/// function. Immutable in normal use — the mutating operations exist for
/// the elimination machinery and for weight updates.
class TDGraph {
 public:
  TDGraph() = default;
  explicit TDGraph(int n, double t_begin = kDayBegin, double t_end = kDayEnd)
      : n_(n), t_begin_(t_begin), t_end_(t_end), out_(n + 1), in_(n + 1) {}

  int n() const { return n_; }
  long m() const { return m_; }
  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }

  void check_vertex(Vertex v) const {
    if (v < 1 || v > n_) throw UnknownVertex("vertex " + std::to_string(v));
  }

  void add_edge(Vertex u, Vertex v, PLF w) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw TdspError("self loop on vertex " + std::to_string(u));
    if (out_[u].count(v))
      throw DuplicateEdge("edge " + std::to_string(u) + " -> " + std::to_string(v));
    in_[v].emplace(u, w);
    out_[u].emplace(v, std::move(w));
    ++m_;
  }

  void replace_edge(Vertex u, Vertex v, PLF w) {
    check_vertex(u);
    check_vertex(v);
    auto it = out_[u].find(v);
    if (it == out_[u].end())
      throw UnknownEdge("edge " + std::to_string(u) + " -> " + std::to_string(v));
    in_[v].find(u)->second = w;
    it->second = std::move(w);
  }

  // Insert or overwrite, used by the reduction operator.
  void upsert_edge(Vertex u, Vertex v, PLF w) {
    auto it = out_[u].find(v);
    if (it == out_[u].end()) {
      add_edge(u, v, std::move(w));
    } else {
      in_[v].find(u)->second = w;
      it->second = std::move(w);
    }
  }

  const PLF* find_edge(Vertex u, Vertex v) const {
    if (u < 1 || u > n_ || v < 1 || v > n_) return nullptr;
    auto it = out_[u].find(v);
    return it == out_[u].end() ? nullptr : &it->second;
  }

  const std::map<Vertex, PLF>& out(Vertex v) const { return out_[v]; }
  const std::map<Vertex, PLF>& in(Vertex v) const { return in_[v]; }

  // Union of in- and out-neighbors, ascending.
  std::vector<Vertex> neighbors(Vertex v) const {
    check_vertex(v);
    std::vector<Vertex> r;
    r.reserve(out_[v].size() + in_[v].size());
    auto a = out_[v].begin(), ae = out_[v].end();
    auto b = in_[v].begin(), be = in_[v].end();
    while (a != ae || b != be) {
      if (b == be || (a != ae && a->first < b->first)) {
        r.push_back(a->first);
        ++a;
      } else if (a == ae || b->first < a->first) {
        r.push_back(b->first);
        ++b;
      } else {
        r.push_back(a->first);
        ++a;
        ++b;
      }
    }
    return r;
  }

  int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }

  // Detaches v from the graph (used when eliminating it).
  void remove_vertex_edges(Vertex v) {
    for (const auto& [w, fn] : out_[v]) in_[w].erase(v);
    for (const auto& [w, fn] : in_[v]) out_[w].erase(v);
    m_ -= static_cast<long>(out_[v].size() + in_[v].size());
    out_[v].clear();
    in_[v].clear();
  }

  // Connectivity of the undirected support; isolated vertices count as
  // disconnected components.
  bool connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(n_ + 1, 0);
    std::vector<Vertex> stack{1};
    seen[1] = 1;
    int found = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          ++found;
          stack.push_back(w);
        }
      }
    }
    return found == n_;
  }

 private:
  int n_ = 0;
  long m_ = 0;
  double t_begin_ = kDayBegin;
  double t_end_ = kDayEnd;
  std::vector<std::map<Vertex, PLF>> out_, in_;
};

struct GraphViolation {
  long line;
  std::string message;
};

struct LoadReport {
  TDGraph graph;  // edges that passed validation
  std::vector<GraphViolation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline bool parse_double(const std::string& tok, double& out) {
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc() && r.ptr == tok.data() + tok.size();
}

inline bool parse_int(const std::string& tok, long& out) {
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc() && r.ptr == tok.data() + tok.size();
}

inline std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> t;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) t.push_back(tok);
  return t;
}

// Shared by the strict and lenient loaders; in strict mode the first
// violation throws.
inline LoadReport load_graph_impl(std::istream& is, bool strict) {
  LoadReport rep;
  bool have_header = false;
  long declared_m = 0;
  long line_no = 0;
  long edges_seen = 0;
  std::string line;

  auto fail = [&](const std::string& msg, long ln) {
    if (strict) throw ParseError(msg, ln);
    rep.violations.push_back({ln, msg});
  };

  while (std::getline(is, line)) {
    ++line_no;
    auto toks = tokens(line);
    if (toks.empty() || toks[0] == "c") continue;
    if (toks[0] == "p") {
      if (have_header) {
        fail("duplicate header", line_no);
        continue;
      }
      long n = 0, m = 0;
      double t0 = 0, t1 = 0;
      if (toks.size() != 6 || toks[1] != "td" || !parse_int(toks[2], n) ||
          !parse_int(toks[3], m) || !parse_double(toks[4], t0) ||
          !parse_double(toks[5], t1)) {
        fail("malformed header, expected 'p td <n> <m> <t_begin> <t_end>'", line_no);
        continue;
      }
      if (n < 1 || m < 0 || !(t0 < t1) || t0 < kDayBegin || t1 > kDayEnd) {
        fail("invalid header values", line_no);
        continue;
      }
      rep.graph = TDGraph(static_cast<int>(n), t0, t1);
      declared_m = m;
      have_header = true;
      continue;
    }
    if (toks[0] == "a") {
      if (!have_header) {
        fail("edge before header", line_no);
        continue;
      }
      long u = 0, v = 0, k = 0;
      if (toks.size() < 4 || !parse_int(toks[1], u) || !parse_int(toks[2], v) ||
          !parse_int(toks[3], k)) {
        fail("malformed edge line", line_no);
        continue;
      }
      ++edges_seen;
      if (k < 1 || toks.size() != static_cast<std::size_t>(4 + 2 * k)) {
        fail("edge breakpoint count mismatch", line_no);
        continue;
      }
      if (u < 1 || u > rep.graph.n() || v < 1 || v > rep.graph.n()) {
        fail("edge endpoint out of range", line_no);
        continue;
      }
      if (u == v) {
        fail("self loop", line_no);
        continue;
      }
      std::vector<Breakpoint> pts;
      pts.reserve(k);
      bool bad = false;
      for (long i = 0; i < k && !bad; ++i) {
        double t = 0, c = 0;
        if (!parse_double(toks[4 + 2 * i], t) || !parse_double(toks[5 + 2 * i], c)) {
          fail("malformed breakpoint", line_no);
          bad = true;
          break;
        }
        if (t < rep.graph.t_begin() || t > rep.graph.t_end()) {
          fail("breakpoint time outside declared domain", line_no);
          bad = true;
          break;
        }
        pts.push_back({t, c});
      }
      if (bad) continue;
      std::string edge_name =
          "edge " + std::to_string(u) + " -> " + std::to_string(v);
      try {
        PLF w(std::move(pts));
        rep.graph.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v),
                           std::move(w));
      } catch (const FifoViolation& e) {
        if (strict) throw FifoViolation(edge_name + ": " + e.what());
        rep.violations.push_back({line_no, edge_name + ": " + e.what()});
      } catch (const DuplicateEdge& e) {
        if (strict) throw;
        rep.violations.push_back({line_no, e.what()});
      } catch (const TdspError& e) {
        fail(edge_name + ": " + e.what(), line_no);
      }
      continue;
    }
    fail("unknown line type '" + toks[0] + "'", line_no);
  }

  if (!have_header) {
    fail("missing header", line_no);
  } else if (edges_seen != declared_m) {
    fail("header declares " + std::to_string(declared_m) + " edges, found " +
             std::to_string(edges_seen),
         line_no);
  }
  return rep;
}

}  // namespace detail

/// Strict load: the first violation throws (ParseError with the line
/// number, FifoViolation naming the edge, or DuplicateEdge).
inline TDGraph load_graph(std::istream& is) {
  return detail::load_graph_impl(is, true).graph;
}

/// Lenient load: returns the edges that validate plus a report of every
/// violation found.
inline LoadReport load_graph_lenient(std::istream& is) {
  return detail::load_graph_impl(is, false);
}

/// Canonical form: header then edges sorted by (u, v), numbers in shortest
/// round-trip notation. load/write is idempotent byte-for-byte.
inline void write_graph(const TDGraph& g, std::ostream& os) {
  os << "p td " << g.n() << ' ' << g.m() << ' '
     << detail::format_double(g.t_begin()) << ' '
     << detail::format_double(g.t_end()) << '\n';
  for (Vertex u = 1; u <= g.n(); ++u) {
    for (const auto& [v, w] : g.out(u)) {
      os << "a " << u << ' ' << v << ' ' << w.size();
      for (const auto& p : w.points())
        os << ' ' << detail::format_double(p.t) << ' '
           << detail::format_double(p.c);
      os << '\n';
    }
  }
}

inline std::vector<Query> load_queries(std::istream& is, const TDGraph& g) {
  std::vector<Query> qs;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto toks = detail::tokens(line);
    if (toks.empty() || toks[0] == "c") continue;
    long s = 0, d = 0;
    double t = 0;
    if (toks[0] != "q" || toks.size() != 4 || !detail::parse_int(toks[1], s) ||
        !detail::parse_int(toks[2], d) || !detail::parse_double(toks[3], t))
      throw ParseError("malformed query line, expected 'q <s> <d> <t>'", line_no);
    if (s < 1 || s > g.n() || d < 1 || d > g.n())
      throw ParseError("query vertex out of range", line_no);
    if (t < g.t_begin() || t > g.t_end())
      throw ParseError("query time outside the graph's time domain", line_no);
    qs.push_back({static_cast<Vertex>(s), static_cast<Vertex>(d), t});
  }
  return qs;
}

inline void write_queries(const std::vector<Query>& qs, std::ostream& os) {
  for (const auto& q : qs)
    os << "q " << q.s << ' ' << q.d << ' ' << detail::format_double(q.t) << '\n';
}

}  // namespace tdsp

#endif  // TDSP_GRAPH_HPP
