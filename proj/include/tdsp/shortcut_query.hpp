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

#ifndef TDSP_SHORTCUT_QUERY_HPP
#define TDSP_SHORTCUT_QUERY_HPP

#include "tdsp/shortcuts.hpp"

namespace tdsp {

// Pruning slack: a vertex is written off only when it exceeds the bound by
// more than this, so floating point noise can never change an answer.
inline constexpr double kPruneSlack = 1e-6;

struct UpperBound {
  QueryMode mode = QueryMode::scalar;
  bool finite = false;
  double scalar = kInf;
  PLF fn = PLF::infinite();
};

namespace detail {

// Shortcut availability over the cut bag. up[k] covers s -> bag[k], down[k]
// covers bag[k] -> d; the endpoints act as zero-cost self hops.
struct CutCoverage {
  std::vector<const PLF*> up;
  std::vector<const PLF*> down;
  std::vector<char> self_up;  // w == s
  std::vector<char> self_down; // w == d
  bool full = true;
  bool any = false;
};

inline CutCoverage cut_coverage(const ShortcutSet& sel, const std::vector<Vertex>& bag,
                                Vertex s, Vertex d) {
  CutCoverage cov;
  cov.up.resize(bag.size(), nullptr);
  cov.down.resize(bag.size(), nullptr);
  cov.self_up.assign(bag.size(), 0);
  cov.self_down.assign(bag.size(), 0);
  for (std::size_t k = 0; k < bag.size(); ++k) {
    Vertex w = bag[k];
    if (w == s) {
      cov.self_up[k] = 1;
    } else if (const auto* fns = sel.find(s, w)) {
      cov.up[k] = &fns->first;
      cov.any = true;
    }
    if (w == d) {
      cov.self_down[k] = 1;
    } else if (const auto* fns = sel.find(d, w)) {
      cov.down[k] = &fns->second;
      cov.any = true;
    }
    if (!(cov.self_up[k] || cov.up[k]) || !(cov.self_down[k] || cov.down[k]))
      cov.full = false;
  }
  return cov;
}

inline UpperBound bound_from_coverage(const CutCoverage& cov,
                                      const std::vector<Vertex>& bag, QueryMode mode,
                                      double t, const PlfOptions& opt) {
  UpperBound b;
  b.mode = mode;
  for (std::size_t k = 0; k < bag.size(); ++k) {
    bool has_up = cov.self_up[k] || cov.up[k];
    bool has_down = cov.self_down[k] || cov.down[k];
    if (!has_up || !has_down) continue;
    if (mode == QueryMode::scalar) {
      double c1 = cov.self_up[k] ? 0.0 : eval(*cov.up[k], t);
      double c2 = cov.self_down[k] ? 0.0 : eval(*cov.down[k], t + c1);
      if (c1 + c2 < b.scalar) {
        b.scalar = c1 + c2;
        b.finite = true;
      }
    } else {
      PLF cand = cov.self_up[k]    ? *cov.down[k]
                 : cov.self_down[k] ? *cov.up[k]
                                    : compound(*cov.up[k], *cov.down[k], opt);
      if (cand.is_infinite()) continue;
      b.fn = b.finite ? min_plf(cand, b.fn, bag[k], kNoVertex, opt) : std::move(cand);
      b.finite = true;
    }
  }
  if (b.mode == QueryMode::profile && b.finite) b.scalar = b.fn.max_cost();
  return b;
}

}  // namespace detail

/// Cheapest s -> d cost realizable purely through selected shortcuts over
/// the cut; +infinity (pruning disabled) when no cut vertex is covered on
/// both sides.
inline UpperBound compute_upper_bound(const TreeDecomposition& tree,
                                      const ShortcutSet& sel, Vertex s, Vertex d,
                                      QueryMode mode, double t = 0.0,
                                      const PlfOptions& opt = {}) {
  tree.check_vertex(s);
  tree.check_vertex(d);
  if (sel.fingerprint != tree.fingerprint())
    throw StaleSelection("shortcut set does not match this index");
  const TreeNode& cut = tree.lca(s, d);
  auto cov = detail::cut_coverage(sel, cut.bag, s, d);
  return detail::bound_from_coverage(cov, cut.bag, mode, t, opt);
}

/// Same answers as basic_query, accelerated by the selected shortcuts.
/// Full cut coverage resolves the query with one pass over the cut bag;
/// partial coverage seeds the searches with exact shortcut values and cuts
/// them off at the shortcut-derived upper bound; no coverage falls back to
/// the basic algorithm.
inline QueryResult query_with_shortcuts(const TreeDecomposition& tree,
                                        const ShortcutSet& sel, Vertex s, Vertex d,
                                        QueryMode mode, double t = 0.0,
                                        const PlfOptions& opt = {}) {
  tree.check_vertex(s);
  tree.check_vertex(d);
  if (sel.fingerprint != tree.fingerprint())
    throw StaleSelection("shortcut set does not match this index");

  QueryResult r;
  r.s = s;
  r.d = d;
  r.depart = t;
  r.mode = mode;
  r.tree = &tree;
  std::uint64_t ops0 = plf_op_counts().total();

  if (s == d) {
    r.reachable = true;
    r.cost = 0.0;
    r.join_vertex = s;
    if (mode == QueryMode::scalar) {
      r.path = {s};
      r.has_path = true;
    } else {
      r.profile = PLF::zero();
    }
    r.plf_ops = plf_op_counts().total() - ops0;
    return r;
  }

  const TreeNode& cut = tree.lca(s, d);
  const auto& bag = cut.bag;
  auto cov = detail::cut_coverage(sel, bag, s, d);

  if (!cov.any) {
    return basic_query(tree, s, d, mode, t, opt);
  }

  if (cov.full) {
    if (mode == QueryMode::scalar) {
      for (std::size_t k = 0; k < bag.size(); ++k) {
        double c1 = cov.self_up[k] ? 0.0 : eval(*cov.up[k], t);
        double c2 = cov.self_down[k] ? 0.0 : eval(*cov.down[k], t + c1);
        if (c1 + c2 < r.cost) {
          r.cost = c1 + c2;
          r.join_vertex = bag[k];
        }
      }
      r.reachable = r.join_vertex != kNoVertex && r.cost < kInf;
      if (!r.reachable) r.cost = kInf;
    } else {
      PLF acc = PLF::infinite();
      bool any = false;
      for (std::size_t k = 0; k < bag.size(); ++k) {
        PLF cand = cov.self_up[k]    ? *cov.down[k]
                   : cov.self_down[k] ? *cov.up[k]
                                      : compound(*cov.up[k], *cov.down[k], opt);
        if (cand.is_infinite()) continue;
        cand = with_via(cand, bag[k]);
        acc = any ? min_plf(cand, acc, bag[k], kNoVertex, opt) : std::move(cand);
        any = true;
      }
      r.reachable = any;
      r.profile = std::move(acc);
      if (r.reachable) r.cost = PLF::eval_impl(r.profile, t);
    }
    r.plf_ops = plf_op_counts().total() - ops0;
    return r;
  }

  // Partial coverage: exact shortcut values seed the searches, and the
  // shortcut-derived upper bound cuts them off early.
  UpperBound ub = detail::bound_from_coverage(cov, bag, mode, t, opt);
  double bound = ub.finite ? ub.scalar : kInf;
  detail::ChainGraph sg = detail::build_chain_graph(tree, s);
  detail::ChainGraph dg = detail::build_chain_graph(tree, d);

  if (mode == QueryMode::scalar) {
    std::vector<std::pair<int, double>> seeds;
    std::vector<char> sealed(sg.verts.size(), 0);
    for (std::size_t k = 0; k < bag.size(); ++k) {
      if (!cov.up[k]) continue;
      int pos = sg.pos.at(bag[k]);
      seeds.push_back({pos, t + PLF::eval_impl(*cov.up[k], t)});
      sealed[pos] = 1;
    }
    detail::ScalarSearch st =
        detail::scalar_sssp(sg, 0, t, seeds, bound, kPruneSlack, &sealed);
    double best_tau = 0.0;
    for (std::size_t k = 0; k < bag.size(); ++k) {
      Vertex w = bag[k];
      double cs;
      if (w == s) {
        cs = 0.0;
      } else {
        int pos = sg.pos.at(w);
        if (st.nil[pos] || st.arrival[pos] == kInf) continue;
        cs = st.arrival[pos] - t;
      }
      if (cs > bound + kPruneSlack) continue;
      double tau = t + cs;
      double cd;
      if (w == d) {
        cd = 0.0;
      } else if (cov.down[k]) {
        cd = PLF::eval_impl(*cov.down[k], tau);
      } else {
        double rem = bound == kInf ? kInf : bound - cs;
        detail::ScalarSearch wd = detail::scalar_sssp(dg, dg.pos.at(w), tau, {}, rem,
                                                      kPruneSlack, nullptr, 0);
        if (wd.arrival[0] == kInf) continue;
        cd = wd.arrival[0] - tau;
      }
      if (cs + cd < r.cost) {
        r.cost = cs + cd;
        r.join_vertex = w;
        best_tau = tau;
      }
    }
    (void)best_tau;
    r.reachable = r.join_vertex != kNoVertex;
    if (!r.reachable) r.cost = kInf;
  } else {
    std::vector<std::pair<int, const PLF*>> seeds_s, seeds_d;
    std::vector<char> sealed_s(sg.verts.size(), 0), sealed_d(dg.verts.size(), 0);
    for (std::size_t k = 0; k < bag.size(); ++k) {
      if (cov.up[k]) {
        int pos = sg.pos.at(bag[k]);
        seeds_s.push_back({pos, cov.up[k]});
        sealed_s[pos] = 1;
      }
      if (cov.down[k]) {
        int pos = dg.pos.at(bag[k]);
        seeds_d.push_back({pos, cov.down[k]});
        sealed_d[pos] = 1;
      }
    }
    auto st = detail::profile_sssp(sg, 0, Direction::from_source, opt, seeds_s,
                                   bound, kPruneSlack, &sealed_s);
    auto dt = detail::profile_sssp(dg, 0, Direction::to_destination, opt, seeds_d,
                                   bound, kPruneSlack, &sealed_d);
    PLF acc = detail::profile_join(s, d, sg, st, dg, dt, bag, opt);
    r.reachable = !acc.is_infinite();
    r.profile = std::move(acc);
    if (r.reachable) r.cost = PLF::eval_impl(r.profile, t);
  }
  r.plf_ops = plf_op_counts().total() - ops0;
  return r;
}

}  // namespace tdsp

#endif  // TDSP_SHORTCUT_QUERY_HPP
