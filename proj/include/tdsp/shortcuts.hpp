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

#ifndef TDSP_SHORTCUTS_HPP
#define TDSP_SHORTCUTS_HPP

#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tdsp/basic_query.hpp"

namespace tdsp {

/// Precomputed exact cost functions between a node and one of its proper
/// ancestors, in both directions, plus the bookkeeping the selection needs:
/// utility (expected climb work saved, weighted by how often this ancestor
/// is the join node), and weight (stored breakpoints of both directions).
struct PairInstance {
  Vertex i = kNoVertex; // deeper node
  Vertex j = kNoVertex; // ancestor
  int order_i = 0;      // elimination rank of i
  int height_j = 0;
  PLF up;   // i -> j
  PLF down; // j -> i
  double utility = 0.0;
  double probability = 0.0;
  int weight = 0;
};

struct CandidateSet {
  std::vector<PairInstance> pairs;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::uint64_t fingerprint = 0;

  static std::uint64_t key(Vertex i, Vertex j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
  }

  const PairInstance* find(Vertex i, Vertex j) const {
    auto it = index.find(key(i, j));
    return it == index.end() ? nullptr : &pairs[it->second];
  }

  PairInstance* find_mut(Vertex i, Vertex j) {
    auto it = index.find(key(i, j));
    return it == index.end() ? nullptr : &pairs[it->second];
  }

  long total_weight() const {
    long w = 0;
    for (const auto& p : pairs) w += p.weight;
    return w;
  }
};

// The formula behind the selection score, exposed so the arithmetic can be
// pinned down in tests: (height_i - height_j) * treewidth * matches / n.
inline double pair_utility(int height_i, int height_j, int treewidth, long matches,
                           long n) {
  return static_cast<double>(static_cast<long>(height_i - height_j) * treewidth) *
         static_cast<double>(matches) / static_cast<double>(n);
}

/// Utility and probability for the pair (i, j). The probability is the
/// fraction of vertices whose join node with i is exactly X(j); counted via
/// subtree sizes: everything under X(j) but not under X(j)'s child on i's
/// root path.
inline std::pair<double, double> compute_utility(const TreeDecomposition& tree,
                                                 Vertex i, Vertex j) {
  tree.check_vertex(i);
  tree.check_vertex(j);
  if (i == j || tree.lca(i, j).owner != j)
    throw NotAnAncestor("X(" + std::to_string(j) + ") is not a proper ancestor of X(" +
                        std::to_string(i) + ")");
  Vertex child_on_path = i;
  while (tree.node(child_on_path).parent != j)
    child_on_path = tree.node(child_on_path).parent;
  long matches =
      tree.node(j).subtree_size - tree.node(child_on_path).subtree_size;
  double p = static_cast<double>(matches) / tree.n();
  double u = pair_utility(tree.node(i).height, tree.node(j).height,
                          tree.treewidth(), matches, tree.n());
  return {u, p};
}

namespace detail {

// Shortcut function a -> b for two distinct vertices on one root path.
inline const PLF* lookup_fn(const CandidateSet& cs, const TreeDecomposition& tree,
                            Vertex a, Vertex b) {
  const PairInstance* p = tree.node(a).height > tree.node(b).height
                              ? cs.find(a, b)
                              : cs.find(b, a);
  if (!p) return nullptr;
  return tree.node(a).height > tree.node(b).height ? &p->up : &p->down;
}

// Both directions for pair (v, j) by the top-down recurrence: route every
// first/last hop through a bag member and reuse that member's functions.
inline std::pair<PLF, PLF> build_pair_fns(const TreeDecomposition& tree,
                                          const CandidateSet& cs, Vertex v, Vertex j,
                                          const PlfOptions& opt) {
  const TreeNode& node = tree.node(v);
  PLF up = PLF::infinite();
  PLF down = PLF::infinite();
  bool have_up = false, have_down = false;
  for (std::size_t k = 1; k < node.bag.size(); ++k) {
    Vertex u = node.bag[k];
    const PLF& leg_out = node.ws[k - 1];
    const PLF& leg_in = node.wd[k - 1];
    if (u == j) {
      if (!leg_out.is_infinite()) {
        up = have_up ? min_plf(leg_out, up, u, kNoVertex, opt) : leg_out;
        have_up = true;
      }
      if (!leg_in.is_infinite()) {
        down = have_down ? min_plf(leg_in, down, u, kNoVertex, opt) : leg_in;
        have_down = true;
      }
      continue;
    }
    const PLF* rest_up = lookup_fn(cs, tree, u, j);
    if (rest_up && !rest_up->is_infinite() && !leg_out.is_infinite()) {
      PLF cand = with_via(compound(leg_out, *rest_up, opt), u);
      up = have_up ? min_plf(cand, up, u, kNoVertex, opt) : std::move(cand);
      have_up = true;
    }
    const PLF* rest_down = lookup_fn(cs, tree, j, u);
    if (rest_down && !rest_down->is_infinite() && !leg_in.is_infinite()) {
      PLF cand = with_via(compound(*rest_down, leg_in, opt), u);
      down = have_down ? min_plf(cand, down, u, kNoVertex, opt) : std::move(cand);
      have_down = true;
    }
  }
  return {std::move(up), std::move(down)};
}

inline std::vector<Vertex> vertices_by_order_desc(const TreeDecomposition& tree) {
  std::vector<Vertex> vs(tree.n());
  for (Vertex v = 1; v <= tree.n(); ++v) vs[v - 1] = v;
  std::sort(vs.begin(), vs.end(), [&](Vertex a, Vertex b) {
    return tree.node(a).order > tree.node(b).order;
  });
  return vs;
}

}  // namespace detail

/// Builds every candidate pair, processing nodes root-downward so each
/// node's functions can reuse its ancestors'. Candidate functions are exact
/// shortest cost profiles.
inline CandidateSet build_all_candidates(const TreeDecomposition& tree,
                                         const PlfOptions& opt = {}) {
  CandidateSet cs;
  cs.fingerprint = tree.fingerprint();
  for (Vertex v : detail::vertices_by_order_desc(tree)) {
    auto ancs = tree.anc(v);
    for (Vertex j : ancs) {
      auto [up, down] = detail::build_pair_fns(tree, cs, v, j, opt);
      PairInstance pi;
      pi.i = v;
      pi.j = j;
      pi.order_i = tree.node(v).order;
      pi.height_j = tree.node(j).height;
      pi.up = std::move(up);
      pi.down = std::move(down);
      auto [u, p] = compute_utility(tree, v, j);
      pi.utility = u;
      pi.probability = p;
      pi.weight = static_cast<int>(pi.up.size() + pi.down.size());
      cs.index.emplace(CandidateSet::key(v, j),
                       static_cast<std::uint32_t>(cs.pairs.size()));
      cs.pairs.push_back(std::move(pi));
    }
  }
  return cs;
}

struct SelectionResult {
  std::vector<std::uint32_t> selected; // indices into CandidateSet::pairs
  double total_utility = 0.0;
  long total_weight = 0;
  long budget = 0;
};

/// Exact 0/1 knapsack over all pair instances: maximize total utility
/// subject to total stored breakpoints <= budget. Ties prefer not
/// selecting. Table memory is k*(budget+1) bits; oversized instances are
/// rejected (use select_greedy there).
inline SelectionResult select_dp(const CandidateSet& cs, long budget) {
  if (budget < 0) throw InfeasibleParameters("negative budget");
  SelectionResult out;
  out.budget = budget;
  std::size_t k = cs.pairs.size();
  if (k == 0 || budget == 0) return out;
  constexpr std::uint64_t kMaxCells = 1ULL << 33; // ~1 GiB of decision bits
  if (static_cast<std::uint64_t>(k) * (budget + 1) > kMaxCells)
    throw InfeasibleParameters(
        "dp selection table would exceed the memory cap; use the greedy strategy");

  // Deterministic item order: by owner elimination rank, then ancestor height.
  std::vector<std::uint32_t> order(k);
  for (std::size_t idx = 0; idx < k; ++idx) order[idx] = static_cast<std::uint32_t>(idx);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto& pa = cs.pairs[a];
    const auto& pb = cs.pairs[b];
    return std::tie(pa.order_i, pa.height_j) < std::tie(pb.order_i, pb.height_j);
  });

  std::vector<double> best(budget + 1, 0.0);
  std::vector<std::vector<bool>> take(k, std::vector<bool>(budget + 1, false));
  for (std::size_t pos = 0; pos < k; ++pos) {
    const auto& p = cs.pairs[order[pos]];
    if (p.weight > budget) continue;
    for (long cap = budget; cap >= p.weight; --cap) {
      double cand = best[cap - p.weight] + p.utility;
      if (cand > best[cap]) {
        best[cap] = cand;
        take[pos][cap] = true;
      }
    }
  }
  long cap = budget;
  for (std::size_t pos = k; pos-- > 0;) {
    if (take[pos][cap]) {
      out.selected.push_back(order[pos]);
      cap -= cs.pairs[order[pos]].weight;
      out.total_weight += cs.pairs[order[pos]].weight;
      out.total_utility += cs.pairs[order[pos]].utility;
    }
  }
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

/// Two greedy passes — utility-descending and density-descending — each
/// stopping at the first item that would overflow the budget; the better
/// pass wins. Items heavier than the whole budget are dropped up front
/// (no feasible solution contains them), which is what makes the result at
/// least half the knapsack optimum.
inline SelectionResult select_greedy(const CandidateSet& cs, long budget) {
  if (budget < 0) throw InfeasibleParameters("negative budget");
  std::vector<std::uint32_t> eligible;
  for (std::size_t idx = 0; idx < cs.pairs.size(); ++idx)
    if (cs.pairs[idx].weight <= budget)
      eligible.push_back(static_cast<std::uint32_t>(idx));

  auto run_pass = [&](auto cmp) {
    std::vector<std::uint32_t> ord = eligible;
    std::sort(ord.begin(), ord.end(), cmp);
    SelectionResult r;
    r.budget = budget;
    for (std::uint32_t idx : ord) {
      const auto& p = cs.pairs[idx];
      if (r.total_weight + p.weight > budget) break;
      r.selected.push_back(idx);
      r.total_weight += p.weight;
      r.total_utility += p.utility;
    }
    return r;
  };

  auto by_utility = [&](std::uint32_t a, std::uint32_t b) {
    const auto& pa = cs.pairs[a];
    const auto& pb = cs.pairs[b];
    if (pa.utility != pb.utility) return pa.utility > pb.utility;
    if (pa.weight != pb.weight) return pa.weight < pb.weight;
    return a < b;
  };
  auto by_density = [&](std::uint32_t a, std::uint32_t b) {
    const auto& pa = cs.pairs[a];
    const auto& pb = cs.pairs[b];
    double da = pa.utility / pa.weight;
    double db = pb.utility / pb.weight;
    if (da != db) return da > db;
    if (pa.utility != pb.utility) return pa.utility > pb.utility;
    return a < b;
  };

  SelectionResult r1 = run_pass(by_utility);
  SelectionResult r2 = run_pass(by_density);
  SelectionResult& win = r1.total_utility > r2.total_utility ? r1 : r2;
  std::sort(win.selected.begin(), win.selected.end());
  return win;
}

/// Query-time store: functions of the selected pairs only; unselected
/// candidates keep just their metadata in the CandidateSet.
struct ShortcutSet {
  std::uint64_t fingerprint = 0;
  long budget = 0;
  std::string strategy = "none";
  double total_utility = 0.0;
  long total_weight = 0;
  std::unordered_map<std::uint64_t, std::pair<PLF, PLF>> fns;

  bool empty() const { return fns.empty(); }

  const std::pair<PLF, PLF>* find(Vertex i, Vertex j) const {
    auto it = fns.find(CandidateSet::key(i, j));
    return it == fns.end() ? nullptr : &it->second;
  }
};

inline ShortcutSet make_shortcut_set(const CandidateSet& cs,
                                     const SelectionResult& sel,
                                     std::string strategy) {
  ShortcutSet s;
  s.fingerprint = cs.fingerprint;
  s.budget = sel.budget;
  s.strategy = std::move(strategy);
  s.total_utility = sel.total_utility;
  s.total_weight = sel.total_weight;
  for (std::uint32_t idx : sel.selected) {
    const auto& p = cs.pairs[idx];
    s.fns.emplace(CandidateSet::key(p.i, p.j), std::make_pair(p.up, p.down));
  }
  return s;
}

/// Replaces the weight of edge (a, b) and propagates: first the stored bag
/// weights whose derivation consumed the edge (re-derived from supporting
/// vertices in elimination order), then, top-down, every candidate pair
/// whose recurrence transitively consumed a changed function. The outcome
/// matches a from-scratch rebuild.
inline void update_edge(TreeDecomposition& tree, CandidateSet& cands, Vertex a,
                        Vertex b, const PLF& new_fn, const PlfOptions& opt = {}) {
  const PLF* old = tree.graph().find_edge(a, b);
  if (!old)
    throw UnknownEdge("edge " + std::to_string(a) + " -> " + std::to_string(b));
  if (cands.fingerprint != tree.fingerprint())
    throw StaleSelection("candidate set was built for a different index state");
  if (old->identical(new_fn)) return;
  tree.graph_mut().replace_edge(a, b, new_fn);

  // Stored bag weights. A pair (src, dst) is owned by the endpoint
  // eliminated first; its value is the minimum of the raw edge and one
  // candidate per supporting vertex z (eliminated earlier, with both
  // endpoints in its bag), folded in elimination order. Processing dirty
  // pairs by owner rank keeps every dependency final before use.
  std::set<std::tuple<int, Vertex, Vertex>> work;
  auto owner_of = [&](Vertex x, Vertex y) {
    return tree.node(x).order < tree.node(y).order ? x : y;
  };
  work.insert({tree.node(owner_of(a, b)).order, a, b});
  std::unordered_set<Vertex> lists_dirty;

  while (!work.empty()) {
    auto [ord, src, dst] = *work.begin();
    work.erase(work.begin());
    Vertex x = owner_of(src, dst);
    Vertex other = x == src ? dst : src;

    PLF acc = PLF::infinite();
    bool have = false;
    if (const PLF* raw = tree.graph().find_edge(src, dst)) {
      acc = *raw;
      have = true;
    }
    for (Vertex z : tree.bags_containing(src)) {
      if (tree.node(z).order >= ord) break;
      const TreeNode& zn = tree.node(z);
      const PLF* first = zn.wd_of(src);
      const PLF* second = zn.ws_of(dst);
      if (!first || !second || first->is_infinite() || second->is_infinite())
        continue;
      PLF cand = with_via(compound(*first, *second, opt), z);
      acc = have ? min_plf(cand, acc, z, kNoVertex, opt) : std::move(cand);
      have = true;
    }
    if (have && !acc.is_infinite()) acc = simplify(acc, opt.simplify_eps);

    TreeNode& xn = tree.node_mut(x);
    int k = xn.bag_index(other);
    if (k < 0) throw CorruptProvenance("updated pair is not bag-adjacent");
    PLF& slot = x == src ? xn.ws[k] : xn.wd[k];
    if (slot.identical(acc)) continue;
    slot = std::move(acc);
    lists_dirty.insert(x);
    for (std::size_t kk = 1; kk < xn.bag.size(); ++kk) {
      Vertex w = xn.bag[kk];
      if (w == other) continue;
      if (x == dst) {
        work.insert({tree.node(owner_of(src, w)).order, src, w});
      } else {
        work.insert({tree.node(owner_of(w, dst)).order, w, dst});
      }
    }
  }

  // Candidate functions, root-down. A node's recurrence consumes its own
  // lists plus pairs owned by its ancestors, so it is recomputed when its
  // lists changed or any ancestor's functions did.
  std::vector<char> changed(tree.n() + 1, 0);
  std::vector<char> changed_above(tree.n() + 1, 0);
  for (Vertex v : detail::vertices_by_order_desc(tree)) {
    Vertex p = tree.node(v).parent;
    bool anc_changed = p != kNoVertex && (changed_above[p] || changed[p]);
    changed_above[v] = anc_changed;
    if (!anc_changed && !lists_dirty.count(v)) continue;
    bool any = false;
    for (Vertex j : tree.anc(v)) {
      PairInstance* pair = cands.find_mut(v, j);
      if (!pair) continue;
      auto [up, down] = detail::build_pair_fns(tree, cands, v, j, opt);
      if (!pair->up.identical(up) || !pair->down.identical(down)) {
        pair->up = std::move(up);
        pair->down = std::move(down);
        pair->weight = static_cast<int>(pair->up.size() + pair->down.size());
        any = true;
      }
    }
    if (any) changed[v] = 1;
  }

  tree.refresh_derived();
  cands.fingerprint = tree.fingerprint();
}

}  // namespace tdsp

#endif  // TDSP_SHORTCUTS_HPP
