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

#ifndef TDSP_DECOMPOSITION_HPP
#define TDSP_DECOMPOSITION_HPP

#include <algorithm>
#include <queue>
#include <vector>

#include "tdsp/graph.hpp"

namespace tdsp {

/// Eliminates v from the working graph. Every ordered neighbor pair (i, j)
/// with a usable two-leg route i -> v -> j gets that route folded in: a new
/// edge when (i, j) was absent, otherwise the pointwise minimum with the
/// existing weight. Segment provenance records v, so shortest costs between
/// all surviving vertices are preserved and paths stay recoverable.
inline void reduce_vertex(TDGraph& g, Vertex v, const PlfOptions& opt = {}) {
  g.check_vertex(v);
  auto nbrs = g.neighbors(v);
  for (Vertex i : nbrs) {
    const PLF* leg_in = g.find_edge(i, v);
    if (!leg_in) continue;
    for (Vertex j : nbrs) {
      if (i == j) continue;
      const PLF* leg_out = g.find_edge(v, j);
      if (!leg_out) continue;
      PLF cand = with_via(compound(*leg_in, *leg_out, opt), v);
      const PLF* old = g.find_edge(i, j);
      if (old) {
        g.upsert_edge(i, j, min_plf(cand, *old, v, kNoVertex, opt));
      } else {
        g.upsert_edge(i, j, std::move(cand));
      }
    }
  }
  g.remove_vertex_edges(v);
}

struct TreeNode {
  Vertex owner = kNoVertex;
  int order = 0;             // elimination rank, 1-based
  Vertex parent = kNoVertex; // kNoVertex for the root
  int height = 0;            // root has height 1
  long subtree_size = 1;
  std::vector<Vertex> children;
  std::vector<Vertex> bag; // owner first, then neighbors ascending
  std::vector<PLF> ws;     // owner -> bag[k+1]
  std::vector<PLF> wd;     // bag[k+1] -> owner

  // Index into ws/wd for bag member u, or -1.
  int bag_index(Vertex u) const {
    auto it = std::lower_bound(bag.begin() + 1, bag.end(), u);
    if (it == bag.end() || *it != u) return -1;
    return static_cast<int>(it - bag.begin()) - 1;
  }

  const PLF* ws_of(Vertex u) const {
    int k = bag_index(u);
    return k < 0 ? nullptr : &ws[k];
  }

  const PLF* wd_of(Vertex u) const {
    int k = bag_index(u);
    return k < 0 ? nullptr : &wd[k];
  }
};

/// Tree over the vertices, one node per vertex, built by smallest-degree
/// elimination. Each node keeps the weight functions between its owner and
/// the bag members as they stood in the reduced graph at elimination time.
/// Construction is single-threaded; the finished tree is immutable under
/// queries and safe to read concurrently.
class TreeDecomposition {
 public:
  TreeDecomposition() = default;

  int n() const { return static_cast<int>(nodes_.size()) - 1; }
  const TreeNode& node(Vertex v) const { return nodes_[v]; }
  TreeNode& node_mut(Vertex v) { return nodes_[v]; }
  Vertex root() const { return root_; }
  int treewidth() const { return treewidth_; }
  int treeheight() const { return treeheight_; }
  int max_elimination_degree() const { return max_elim_degree_; }
  const TDGraph& graph() const { return graph_; }
  TDGraph& graph_mut() { return graph_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  // Nodes whose bag contains u (other than X(u) itself), elimination order
  // ascending.
  const std::vector<Vertex>& bags_containing(Vertex u) const {
    return bags_containing_[u];
  }

  void check_vertex(Vertex v) const {
    if (v < 1 || v > n()) throw UnknownVertex("vertex " + std::to_string(v));
  }

  /// Owners of the proper ancestors of X(v), root first.
  std::vector<Vertex> anc(Vertex v) const {
    check_vertex(v);
    std::vector<Vertex> up;
    for (Vertex p = nodes_[v].parent; p != kNoVertex; p = nodes_[p].parent)
      up.push_back(p);
    std::reverse(up.begin(), up.end());
    return up;
  }

  /// Lowest common ancestor of X(a) and X(b); the shallower node when one
  /// is an ancestor of the other.
  const TreeNode& lca(Vertex a, Vertex b) const {
    check_vertex(a);
    check_vertex(b);
    while (nodes_[a].height > nodes_[b].height) a = nodes_[a].parent;
    while (nodes_[b].height > nodes_[a].height) b = nodes_[b].parent;
    while (a != b) {
      a = nodes_[a].parent;
      b = nodes_[b].parent;
    }
    return nodes_[a];
  }

  void refresh_derived() { compute_fingerprint(); }

  friend TreeDecomposition build_tfp_tree(const TDGraph&, const PlfOptions&);
  friend struct TreeBuilderAccess;

  // Also used by deserialization.
  void finalize_structure() {
    int nn = n();
    bags_containing_.assign(nn + 1, {});
    for (Vertex v = 1; v <= nn; ++v) {
      nodes_[v].children.clear();
      nodes_[v].subtree_size = 1;
    }
    for (Vertex v = 1; v <= nn; ++v) {
      for (std::size_t k = 1; k < nodes_[v].bag.size(); ++k)
        bags_containing_[nodes_[v].bag[k]].push_back(v);
      if (nodes_[v].parent != kNoVertex)
        nodes_[nodes_[v].parent].children.push_back(v);
    }
    for (Vertex u = 1; u <= nn; ++u)
      std::sort(bags_containing_[u].begin(), bags_containing_[u].end(),
                [&](Vertex a, Vertex b) { return nodes_[a].order < nodes_[b].order; });
    // Heights by BFS from the root, then subtree sizes bottom-up.
    std::vector<Vertex> bfs{root_};
    nodes_[root_].height = 1;
    for (std::size_t i = 0; i < bfs.size(); ++i) {
      Vertex v = bfs[i];
      for (Vertex ch : nodes_[v].children) {
        nodes_[ch].height = nodes_[v].height + 1;
        bfs.push_back(ch);
      }
    }
    for (auto it = bfs.rbegin(); it != bfs.rend(); ++it) {
      Vertex v = *it;
      if (nodes_[v].parent != kNoVertex)
        nodes_[nodes_[v].parent].subtree_size += nodes_[v].subtree_size;
    }
    treewidth_ = 0;
    treeheight_ = 0;
    for (Vertex v = 1; v <= nn; ++v) {
      treewidth_ = std::max(treewidth_, static_cast<int>(nodes_[v].bag.size()) - 1);
      treeheight_ = std::max(treeheight_, nodes_[v].height);
    }
    refresh_derived();
  }

 private:
  void compute_fingerprint() {
    // FNV-1a over the elimination order and the raw edge weights.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
      const unsigned char* p = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
      }
    };
    auto mix_d = [&](double d) { mix(&d, sizeof d); };
    auto mix_i = [&](std::int64_t v) { mix(&v, sizeof v); };
    mix_i(n());
    mix_i(graph_.m());
    for (Vertex v = 1; v <= n(); ++v) mix_i(nodes_[v].order);
    for (Vertex u = 1; u <= graph_.n(); ++u) {
      for (const auto& [v, fn] : graph_.out(u)) {
        mix_i(u);
        mix_i(v);
        mix_i(static_cast<std::int64_t>(fn.size()));
        for (const auto& p : fn.points()) {
          mix_d(p.t);
          mix_d(p.c);
        }
      }
    }
    fingerprint_ = h;
  }

  std::vector<TreeNode> nodes_; // indexed by owner id, [0] unused
  std::vector<std::vector<Vertex>> bags_containing_;
  Vertex root_ = kNoVertex;
  int treewidth_ = 0;
  int treeheight_ = 0;
  int max_elim_degree_ = 0;
  std::uint64_t fingerprint_ = 0;
  TDGraph graph_;
};

// Deserialization backdoor for the index reader.
struct TreeBuilderAccess {
  static TreeDecomposition assemble(TDGraph graph, std::vector<TreeNode> nodes,
                                    Vertex root) {
    TreeDecomposition t;
    t.graph_ = std::move(graph);
    t.nodes_ = std::move(nodes);
    t.root_ = root;
    t.finalize_structure();
    return t;
  }
};

/// Smallest-degree elimination over a copy of g (ties broken by smallest
/// vertex id). Bags capture the reduced-graph neighborhood at elimination
/// time; ws/wd snapshot the weights of that moment, simplified. Requires a
/// connected graph.
inline TreeDecomposition build_tfp_tree(const TDGraph& g, const PlfOptions& opt = {}) {
  if (g.n() < 1) throw InfeasibleParameters("empty graph");
  if (!g.connected()) throw DisconnectedGraph("graph is not connected");

  TreeDecomposition tree;
  tree.graph_ = g;
  tree.nodes_.assign(g.n() + 1, TreeNode{});

  TDGraph work = g;
  using Item = std::pair<int, Vertex>; // (degree, vertex), smallest first
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  std::vector<char> done(g.n() + 1, 0);
  for (Vertex v = 1; v <= g.n(); ++v) heap.push({work.degree(v), v});

  for (int step = 1; step <= g.n(); ++step) {
    Vertex v = kNoVertex;
    while (!heap.empty()) {
      auto [deg, u] = heap.top();
      heap.pop();
      if (done[u] || work.degree(u) != deg) continue;
      v = u;
      break;
    }
    if (v == kNoVertex) throw TdspError("elimination heap exhausted");

    auto nbrs = work.neighbors(v);
    tree.max_elim_degree_ = std::max(tree.max_elim_degree_,
                                     static_cast<int>(nbrs.size()));
    TreeNode& node = tree.nodes_[v];
    node.owner = v;
    node.order = step;
    node.bag.reserve(nbrs.size() + 1);
    node.bag.push_back(v);
    node.bag.insert(node.bag.end(), nbrs.begin(), nbrs.end());
    node.ws.reserve(nbrs.size());
    node.wd.reserve(nbrs.size());
    for (Vertex u : nbrs) {
      const PLF* s = work.find_edge(v, u);
      const PLF* d = work.find_edge(u, v);
      node.ws.push_back(s ? simplify(*s, opt.simplify_eps) : PLF::infinite());
      node.wd.push_back(d ? simplify(*d, opt.simplify_eps) : PLF::infinite());
    }
    // Reduce over the exact functions that were snapshotted, so an
    // incremental re-derivation from stored lists reproduces this
    // construction bit for bit.
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (!node.ws[k].is_infinite()) work.upsert_edge(v, nbrs[k], node.ws[k]);
      if (!node.wd[k].is_infinite()) work.upsert_edge(nbrs[k], v, node.wd[k]);
    }

    reduce_vertex(work, v, opt);
    done[v] = 1;
    for (Vertex u : nbrs)
      if (!done[u]) heap.push({work.degree(u), u});
  }

  for (Vertex v = 1; v <= g.n(); ++v) {
    TreeNode& node = tree.nodes_[v];
    if (node.bag.size() == 1) {
      // Only the last-eliminated vertex on a connected graph.
      if (tree.root_ == kNoVertex ||
          node.order > tree.nodes_[tree.root_].order)
        tree.root_ = v;
      continue;
    }
    Vertex best = node.bag[1];
    for (std::size_t k = 2; k < node.bag.size(); ++k)
      if (tree.nodes_[node.bag[k]].order < tree.nodes_[best].order)
        best = node.bag[k];
    node.parent = best;
  }
  if (tree.root_ == kNoVertex) throw TdspError("no root produced by elimination");

  tree.finalize_structure();
  return tree;
}

}  // namespace tdsp

#endif  // TDSP_DECOMPOSITION_HPP
