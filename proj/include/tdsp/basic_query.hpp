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

#ifndef TDSP_BASIC_QUERY_HPP
#define TDSP_BASIC_QUERY_HPP

#include <deque>
#include <queue>
#include <unordered_map>
#include <vector>

#include "tdsp/decomposition.hpp"

namespace tdsp {

enum class QueryMode { scalar, profile };
enum class Direction { from_source, to_destination };

/// Costs from (or to) one vertex for every vertex on its root path. Scalar
/// tables also carry the predecessor used, for path reconstruction.
struct CostTable {
  QueryMode mode = QueryMode::profile;
  Direction direction = Direction::from_source;
  Vertex origin = kNoVertex;
  double depart = 0.0; // scalar mode anchor time
  std::unordered_map<Vertex, double> cost;
  std::unordered_map<Vertex, Vertex> via;
  std::unordered_map<Vertex, PLF> fn;
};

struct QueryResult {
  Vertex s = kNoVertex;
  Vertex d = kNoVertex;
  double depart = 0.0;
  QueryMode mode = QueryMode::scalar;
  bool reachable = false;
  double cost = kInf;   // scalar answer; profile mode: profile evaluated at depart
  PLF profile;          // profile mode only
  Vertex join_vertex = kNoVertex;
  bool has_path = false;
  std::vector<Vertex> path; // scalar mode; filled eagerly or by reconstruct_path
  std::uint64_t plf_ops = 0;
  const TreeDecomposition* tree = nullptr; // enables lazy reconstruction
};

namespace detail {

// The root-path graph of v: vertices {v} + ancestors, edges the stored bag
// weight lists of every node on the path, both directions. Shortest costs
// between its vertices equal those of the full graph.
struct ChainGraph {
  std::vector<Vertex> verts; // verts[0] = origin, then ancestors deepest-first
  std::unordered_map<Vertex, int> pos;
  // edges[i]: (target position, weight i -> target)
  std::vector<std::vector<std::pair<int, const PLF*>>> edges;
};

inline ChainGraph build_chain_graph(const TreeDecomposition& tree, Vertex v) {
  ChainGraph cg;
  for (Vertex x = v; x != kNoVertex; x = tree.node(x).parent) {
    cg.pos.emplace(x, static_cast<int>(cg.verts.size()));
    cg.verts.push_back(x);
  }
  cg.edges.resize(cg.verts.size());
  for (int i = 0; i < static_cast<int>(cg.verts.size()); ++i) {
    const TreeNode& node = tree.node(cg.verts[i]);
    for (std::size_t k = 1; k < node.bag.size(); ++k) {
      int j = cg.pos.at(node.bag[k]); // bag members are ancestors: always present
      if (!node.ws[k - 1].is_infinite()) cg.edges[i].push_back({j, &node.ws[k - 1]});
      if (!node.wd[k - 1].is_infinite()) cg.edges[j].push_back({i, &node.wd[k - 1]});
    }
  }
  return cg;
}

struct ScalarSearch {
  std::vector<double> arrival;          // by chain position; kInf unreached
  std::vector<int> pred;                // chain position, -1 none
  std::vector<const PLF*> pred_fn;      // weight used for the final hop
  std::vector<char> nil;                // proven more expensive than the bound
};

// Time-dependent Dijkstra over the root-path graph. `seeds` preloads exact
// arrivals (shortcut values). With a finite bound the search stops once
// settled labels exceed bound + slack; everything unsettled is marked nil.
inline ScalarSearch scalar_sssp(const ChainGraph& cg, int src, double depart,
                                const std::vector<std::pair<int, double>>& seeds = {},
                                double bound = kInf, double slack = 0.0,
                                const std::vector<char>* sealed = nullptr,
                                int target = -1) {
  std::size_t n = cg.verts.size();
  ScalarSearch out;
  out.arrival.assign(n, kInf);
  out.pred.assign(n, -1);
  out.pred_fn.assign(n, nullptr);
  out.nil.assign(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  auto push = [&](int v, double a, int from, const PLF* fn) {
    if (a < out.arrival[v]) {
      out.arrival[v] = a;
      out.pred[v] = from;
      out.pred_fn[v] = fn;
      pq.push({a, v});
    }
  };
  if (src >= 0) push(src, depart, -1, nullptr);
  for (auto [v, a] : seeds) push(v, a, -1, nullptr);
  std::vector<char> done(n, 0);
  bool cut_off = false;
  while (!pq.empty()) {
    auto [a, v] = pq.top();
    pq.pop();
    if (done[v] || a > out.arrival[v]) continue;
    if (a - depart > bound + slack) {
      cut_off = true;
      break;
    }
    done[v] = 1;
    if (v == target) break;
    for (auto [w, fn] : cg.edges[v]) {
      if (done[w]) continue;
      if (sealed && (*sealed)[w]) continue;
      push(w, a + PLF::eval_impl(*fn, a), v, fn);
    }
  }
  if (cut_off) {
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v]) out.nil[v] = 1;
  }
  return out;
}

inline bool improves_somewhere(const PLF& cand, const PLF& old) {
  auto probe = [&](double t) {
    return PLF::eval_impl(cand, t) < PLF::eval_impl(old, t) - 1e-12;
  };
  for (const auto& p : cand.points())
    if (probe(p.t)) return true;
  for (const auto& p : old.points())
    if (probe(p.t)) return true;
  return false;
}

struct ProfileSearch {
  std::vector<PLF> fn;       // by chain position; infinite when unreached
  std::vector<char> nil;     // cheapest day cost exceeds the bound
};

// Exact cost profiles over the root-path graph by label correction: labels
// are pointwise minima over simple-path profiles, which is a finite
// lattice, so the queue drains. With a finite bound, a vertex whose
// cheapest cost over the whole day exceeds it is not expanded (safe
// dominance: no route through it can ever win).
inline ProfileSearch profile_sssp(const ChainGraph& cg, int origin, Direction dir,
                                  const PlfOptions& opt,
                                  const std::vector<std::pair<int, const PLF*>>& seeds = {},
                                  double bound = kInf, double slack = 0.0,
                                  const std::vector<char>* sealed = nullptr) {
  std::size_t n = cg.verts.size();
  ProfileSearch out;
  out.fn.assign(n, PLF::infinite());
  out.nil.assign(n, 0);

  // reverse adjacency for the to-destination direction
  std::vector<std::vector<std::pair<int, const PLF*>>> radj;
  if (dir == Direction::to_destination) {
    radj.resize(n);
    for (std::size_t v = 0; v < n; ++v)
      for (auto [w, fn] : cg.edges[v]) radj[w].push_back({static_cast<int>(v), fn});
  }

  std::vector<char> queued(n, 0);
  std::deque<int> queue;
  auto enqueue = [&](int v) {
    if (!queued[v]) {
      queued[v] = 1;
      queue.push_back(v);
    }
  };
  if (origin >= 0) {
    out.fn[origin] = PLF::zero();
    enqueue(origin);
  }
  for (auto [v, fn] : seeds) {
    out.fn[v] = *fn;
    enqueue(v);
  }

  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    queued[v] = 0;
    const PLF& src = out.fn[v];
    if (src.is_infinite()) continue;
    if (src.min_cost() > bound + slack) continue; // dominance pruning
    const auto& nbrs = dir == Direction::from_source ? cg.edges[v] : radj[v];
    for (auto [w, fn] : nbrs) {
      if (sealed && (*sealed)[w]) continue;
      PLF cand = dir == Direction::from_source ? compound(src, *fn, opt)
                                               : compound(*fn, src, opt);
      if (out.fn[w].is_infinite()) {
        out.fn[w] = std::move(cand);
        enqueue(w);
      } else if (improves_somewhere(cand, out.fn[w])) {
        out.fn[w] = min_plf(cand, out.fn[w], kNoVertex, kNoVertex, opt);
        enqueue(w);
      }
    }
  }
  if (bound < kInf) {
    for (std::size_t v = 0; v < n; ++v)
      if (out.fn[v].is_infinite() || out.fn[v].min_cost() > bound + slack)
        out.nil[v] = 1;
  }
  return out;
}

// Expands one stored hop from -> to into original-graph vertices by
// following per-segment provenance; appends everything after `from` to out
// and returns the traversal cost.
inline double unpack_hop(const TreeDecomposition& tree, const PLF& fn, Vertex from,
                         Vertex to, double depart, std::vector<Vertex>& out,
                         int depth) {
  if (depth > tree.n() + 1)
    throw CorruptProvenance("provenance recursion exceeds vertex count");
  Vertex z = fn.via_at(depart);
  if (z == kNoVertex) {
    const PLF* raw = tree.graph().find_edge(from, to);
    if (!raw)
      throw CorruptProvenance("direct segment " + std::to_string(from) + " -> " +
                              std::to_string(to) + " has no underlying edge");
    out.push_back(to);
    return PLF::eval_impl(*raw, depart);
  }
  const TreeNode& zn = tree.node(z);
  const PLF* first = zn.wd_of(from);
  const PLF* second = zn.ws_of(to);
  if (!first || !second)
    throw CorruptProvenance("intermediate vertex " + std::to_string(z) +
                            " does not connect " + std::to_string(from) + " and " +
                            std::to_string(to));
  double c1 = unpack_hop(tree, *first, from, z, depart, out, depth + 1);
  double c2 = unpack_hop(tree, *second, z, to, depart + c1, out, depth + 1);
  return c1 + c2;
}

// Walks Dijkstra predecessors from `target` back to the search origin and
// expands every stored hop; appends vertices after the origin to `path`.
inline void expand_pred_chain(const TreeDecomposition& tree, const ChainGraph& cg,
                              const ScalarSearch& search, int target, double depart_at_origin,
                              std::vector<Vertex>& path) {
  std::vector<int> order;
  for (int v = target; search.pred[v] != -1; v = search.pred[v]) order.push_back(v);
  std::reverse(order.begin(), order.end());
  double now = depart_at_origin;
  for (int v : order) {
    const PLF* fn = search.pred_fn[v];
    Vertex from = cg.verts[search.pred[v]];
    Vertex to = cg.verts[v];
    if (!fn) throw CorruptProvenance("predecessor chain lost its weight function");
    now += unpack_hop(tree, *fn, from, to, now, path, 0);
  }
}

struct ScalarAnswer {
  bool reachable = false;
  double cost = kInf;
  Vertex join_vertex = kNoVertex;
  std::vector<Vertex> path;
};

// Scalar query via the vertex cut: exact arrivals from s over its root-path
// graph, then for each cut vertex the exact remainder to d over d's
// root-path graph, departing at the arrival time.
inline ScalarAnswer scalar_query_impl(const TreeDecomposition& tree, Vertex s,
                                      Vertex d, double t, bool want_path,
                                      const PlfOptions& opt = {}) {
  (void)opt;
  ScalarAnswer ans;
  if (s == d) {
    ans.reachable = true;
    ans.cost = 0.0;
    ans.join_vertex = s;
    if (want_path) ans.path = {s};
    return ans;
  }
  ChainGraph sg = build_chain_graph(tree, s);
  ChainGraph dg = build_chain_graph(tree, d);
  ScalarSearch st = scalar_sssp(sg, 0, t);
  const TreeNode& cut = tree.lca(s, d);

  double best_tau = 0.0;
  for (Vertex w : cut.bag) {
    double cs;
    if (w == s) {
      cs = 0.0;
    } else {
      auto it = sg.pos.find(w);
      if (it == sg.pos.end() || st.arrival[it->second] == kInf) continue;
      cs = st.arrival[it->second] - t;
    }
    double tau = t + cs;
    double cd;
    if (w == d) {
      cd = 0.0;
    } else {
      ScalarSearch wd = scalar_sssp(dg, dg.pos.at(w), tau, {}, kInf, 0.0, nullptr, 0);
      if (wd.arrival[0] == kInf) continue;
      cd = wd.arrival[0] - tau;
    }
    if (cs + cd < ans.cost) {
      ans.cost = cs + cd;
      ans.join_vertex = w;
      best_tau = tau;
    }
  }
  if (ans.join_vertex == kNoVertex) {
    ans.cost = kInf;
    return ans;
  }
  ans.reachable = true;

  if (want_path) {
    ans.path.push_back(s);
    if (ans.join_vertex != s)
      expand_pred_chain(tree, sg, st, sg.pos.at(ans.join_vertex), t, ans.path);
    if (ans.join_vertex != d) {
      ScalarSearch wd = scalar_sssp(dg, dg.pos.at(ans.join_vertex), best_tau);
      expand_pred_chain(tree, dg, wd, 0, best_tau, ans.path);
    }
  }
  return ans;
}

// Profile join over the cut bag; each candidate is labeled with its join
// vertex. Returns an infinite function when no candidate connects.
inline PLF profile_join(Vertex s, Vertex d, const ChainGraph& sg,
                        const ProfileSearch& st, const ChainGraph& dg,
                        const ProfileSearch& dt, const std::vector<Vertex>& cut_bag,
                        const PlfOptions& opt = {}) {
  PLF acc = PLF::infinite();
  bool any = false;
  for (Vertex w : cut_bag) {
    PLF cand;
    if (w == s) {
      const PLF& fd = dt.fn[dg.pos.at(w)];
      if (fd.is_infinite()) continue;
      cand = with_via(fd, w);
    } else if (w == d) {
      const PLF& fs = st.fn[sg.pos.at(w)];
      if (fs.is_infinite()) continue;
      cand = with_via(fs, w);
    } else {
      auto is = sg.pos.find(w);
      auto id = dg.pos.find(w);
      if (is == sg.pos.end() || id == dg.pos.end()) continue;
      const PLF& fs = st.fn[is->second];
      const PLF& fd = dt.fn[id->second];
      if (fs.is_infinite() || fd.is_infinite()) continue;
      cand = with_via(compound(fs, fd, opt), w);
    }
    acc = any ? min_plf(cand, acc, w, kNoVertex, opt) : std::move(cand);
    any = true;
  }
  return acc;
}

}  // namespace detail

/// Exact shortest cost from v (or to v) for every vertex of its root path,
/// as full cost profiles.
inline CostTable ascend(const TreeDecomposition& tree, Vertex v, Direction dir,
                        const PlfOptions& opt = {}) {
  tree.check_vertex(v);
  CostTable t;
  t.mode = QueryMode::profile;
  t.direction = dir;
  t.origin = v;
  detail::ChainGraph cg = detail::build_chain_graph(tree, v);
  detail::ProfileSearch search = detail::profile_sssp(cg, 0, dir, opt);
  for (std::size_t i = 1; i < cg.verts.size(); ++i)
    if (!search.fn[i].is_infinite()) t.fn.emplace(cg.verts[i], std::move(search.fn[i]));
  return t;
}

/// Scalar variant of the source-side table for a fixed departure time.
inline CostTable ascend_scalar(const TreeDecomposition& tree, Vertex s, double t) {
  tree.check_vertex(s);
  CostTable out;
  out.mode = QueryMode::scalar;
  out.direction = Direction::from_source;
  out.origin = s;
  out.depart = t;
  detail::ChainGraph cg = detail::build_chain_graph(tree, s);
  detail::ScalarSearch search = detail::scalar_sssp(cg, 0, t);
  for (std::size_t i = 1; i < cg.verts.size(); ++i) {
    if (search.arrival[i] == kInf) continue;
    out.cost.emplace(cg.verts[i], search.arrival[i] - t);
    out.via.emplace(cg.verts[i],
                    search.pred[i] >= 0 ? cg.verts[search.pred[i]] : kNoVertex);
  }
  return out;
}

/// Answers a query by searching both endpoints' root-path graphs and
/// joining over the lowest-common-ancestor bag, a vertex cut between them.
inline QueryResult basic_query(const TreeDecomposition& tree, Vertex s, Vertex d,
                               QueryMode mode, double t = 0.0,
                               const PlfOptions& opt = {}) {
  tree.check_vertex(s);
  tree.check_vertex(d);
  QueryResult r;
  r.s = s;
  r.d = d;
  r.depart = t;
  r.mode = mode;
  r.tree = &tree;
  std::uint64_t ops0 = plf_op_counts().total();

  if (mode == QueryMode::scalar) {
    auto ans = detail::scalar_query_impl(tree, s, d, t, true, opt);
    r.reachable = ans.reachable;
    r.cost = ans.cost;
    r.join_vertex = ans.join_vertex;
    r.path = std::move(ans.path);
    r.has_path = r.reachable;
  } else {
    if (s == d) {
      r.reachable = true;
      r.profile = PLF::zero();
      r.cost = 0.0;
      r.join_vertex = s;
    } else {
      detail::ChainGraph sg = detail::build_chain_graph(tree, s);
      detail::ChainGraph dg = detail::build_chain_graph(tree, d);
      auto st = detail::profile_sssp(sg, 0, Direction::from_source, opt);
      auto dt = detail::profile_sssp(dg, 0, Direction::to_destination, opt);
      const TreeNode& cut = tree.lca(s, d);
      PLF prof = detail::profile_join(s, d, sg, st, dg, dt, cut.bag, opt);
      r.reachable = !prof.is_infinite();
      r.profile = std::move(prof);
      if (r.reachable) r.cost = PLF::eval_impl(r.profile, t);
    }
  }
  r.plf_ops = plf_op_counts().total() - ops0;
  return r;
}

/// Vertex sequence of a scalar result, recovered by expanding recorded
/// intermediate vertices; computed lazily for results produced without one.
inline const std::vector<Vertex>& reconstruct_path(QueryResult& r) {
  if (r.has_path) return r.path;
  if (!r.tree) throw CorruptProvenance("result is not attached to a tree");
  if (r.mode != QueryMode::scalar)
    throw TdspError("path reconstruction applies to scalar results");
  if (!r.reachable) throw TdspError("no path: destination unreachable");
  auto ans = detail::scalar_query_impl(*r.tree, r.s, r.d, r.depart, true);
  r.path = std::move(ans.path);
  r.has_path = true;
  return r.path;
}

}  // namespace tdsp

#endif  // TDSP_BASIC_QUERY_HPP
