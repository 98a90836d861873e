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

#include "tdsp/shortcuts.hpp"

#include <gtest/gtest.h>

#include "tdsp/generate.hpp"
#include "tdsp/oracle.hpp"
#include "test_util.hpp"

namespace tdsp {
namespace {

// Synthetic selection instance with hand-picked utilities and weights.
CandidateSet synthetic_instance(const std::vector<std::pair<double, int>>& items) {
  CandidateSet cs;
  Vertex i = 2;
  for (const auto& [u, w] : items) {
    PairInstance p;
    p.i = i;
    p.j = 1;
    p.order_i = static_cast<int>(cs.pairs.size()) + 1;
    p.height_j = 1;
    p.utility = u;
    p.weight = w;
    p.up = PLF::constant(1.0);
    p.down = PLF::constant(1.0);
    cs.index.emplace(CandidateSet::key(i, 1),
                     static_cast<std::uint32_t>(cs.pairs.size()));
    cs.pairs.push_back(std::move(p));
    ++i;
  }
  return cs;
}

double brute_force_best(const CandidateSet& cs, long budget) {
  std::size_t k = cs.pairs.size();
  double best = 0.0;
  for (std::size_t mask = 0; mask < (1u << k); ++mask) {
    long w = 0;
    double u = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        w += cs.pairs[i].weight;
        u += cs.pairs[i].utility;
      }
    }
    if (w <= budget && u > best) best = u;
  }
  return best;
}

TEST(Candidates, DepthTwoChainEqualsBagWeight) {
  TDGraph g(2);
  PLF up({{0, 10}, {20, 10}, {60, 15}});
  PLF down({{0, 12}, {30, 12}, {70, 17}});
  g.add_edge(1, 2, up);
  g.add_edge(2, 1, down);
  TreeDecomposition tree = build_tfp_tree(g);
  CandidateSet cs = build_all_candidates(tree);
  ASSERT_EQ(cs.pairs.size(), 1u);
  Vertex leaf = tree.root() == 1 ? 2 : 1;
  const PairInstance* p = cs.find(leaf, tree.root());
  ASSERT_NE(p, nullptr);
  const TreeNode& node = tree.node(leaf);
  EXPECT_TRUE(p->up.identical(node.ws[0]));
  EXPECT_TRUE(p->down.identical(node.wd[0]));
}

TEST(Candidates, CountEqualsSumOfAncestors) {
  TDGraph g = generate_graph(30, 3.0, 3, 61);
  TreeDecomposition tree = build_tfp_tree(g);
  CandidateSet cs = build_all_candidates(tree);
  std::size_t want = 0;
  for (Vertex v = 1; v <= 30; ++v) want += tree.anc(v).size();
  EXPECT_EQ(cs.pairs.size(), want);
}

TEST(Candidates, FunctionsMatchOracle) {
  for (std::uint64_t seed : {71, 72}) {
    TDGraph g = generate_graph(30, 3.0, 3, seed);
    TreeDecomposition tree = build_tfp_tree(g);
    CandidateSet cs = build_all_candidates(tree);
    for (const auto& p : cs.pairs) {
      for (double t : test::sample_times(16)) {
        auto up = td_dijkstra(g, p.i, p.j, t);
        ASSERT_TRUE(up.has_value());
        ASSERT_NEAR(eval(p.up, t), up->cost, 1e-6)
            << "pair " << p.i << "->" << p.j << " t=" << t;
        auto down = td_dijkstra(g, p.j, p.i, t);
        ASSERT_TRUE(down.has_value());
        ASSERT_NEAR(eval(p.down, t), down->cost, 1e-6)
            << "pair " << p.j << "->" << p.i << " t=" << t;
      }
    }
  }
}

TEST(Utility, FormulaArithmetic) {
  // height difference 4, treewidth 3, 5 of 15 vertices match
  EXPECT_DOUBLE_EQ(pair_utility(7, 3, 3, 5, 15), 4.0);
  double p = 5.0 / 15.0;
  EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(Utility, MatchesBruteForceLcaCounting) {
  TDGraph g = generate_graph(25, 3.0, 3, 81);
  TreeDecomposition tree = build_tfp_tree(g);
  for (Vertex i = 1; i <= 25; i += 3) {
    long running = 0;
    for (Vertex j : tree.anc(i)) {
      auto [u, p] = compute_utility(tree, i, j);
      long matches = 0;
      for (Vertex k = 1; k <= 25; ++k)
        if (tree.lca(i, k).owner == j) ++matches;
      EXPECT_NEAR(p, static_cast<double>(matches) / 25.0, 1e-15);
      double want = pair_utility(tree.node(i).height, tree.node(j).height,
                                 tree.treewidth(), matches, 25);
      EXPECT_NEAR(u, want, 1e-12);
      running += matches;
    }
    // every vertex not at or below X(i) joins at some proper ancestor
    EXPECT_EQ(running, 25 - tree.node(i).subtree_size);
  }
}

TEST(Utility, RejectsNonAncestor) {
  TDGraph g = generate_graph(10, 2.0, 2, 5);
  TreeDecomposition tree = build_tfp_tree(g);
  EXPECT_THROW(compute_utility(tree, 3, 3), NotAnAncestor);
  Vertex below = kNoVertex; // some vertex that is NOT an ancestor of the root
  for (Vertex v = 1; v <= 10; ++v)
    if (v != tree.root()) below = v;
  EXPECT_THROW(compute_utility(tree, tree.root(), below), NotAnAncestor);
}

TEST(SelectDp, EmptyBudget) {
  auto cs = synthetic_instance({{10, 5}, {20, 5}});
  SelectionResult r = select_dp(cs, 0);
  EXPECT_TRUE(r.selected.empty());
  EXPECT_DOUBLE_EQ(r.total_utility, 0.0);
}

TEST(SelectDp, BudgetCoversEverything) {
  auto cs = synthetic_instance({{10, 5}, {20, 7}, {1, 2}});
  SelectionResult r = select_dp(cs, 100);
  EXPECT_EQ(r.selected.size(), 3u);
  EXPECT_DOUBLE_EQ(r.total_utility, 31.0);
  EXPECT_EQ(r.total_weight, 14);
}

TEST(SelectDp, MatchesBruteForce) {
  std::mt19937_64 rng(91);
  std::uniform_int_distribution<int> count(1, 12);
  std::uniform_int_distribution<int> weight(1, 30);
  std::uniform_int_distribution<int> utility(0, 100);
  std::uniform_int_distribution<long> budget(0, 100);
  for (int it = 0; it < 200; ++it) {
    std::vector<std::pair<double, int>> items;
    int k = count(rng);
    for (int i = 0; i < k; ++i)
      items.push_back({static_cast<double>(utility(rng)), weight(rng)});
    auto cs = synthetic_instance(items);
    long n = budget(rng);
    SelectionResult r = select_dp(cs, n);
    EXPECT_DOUBLE_EQ(r.total_utility, brute_force_best(cs, n)) << "it=" << it;
    EXPECT_LE(r.total_weight, n);
  }
}

TEST(SelectGreedy, SingleFittingCandidate) {
  auto cs = synthetic_instance({{10, 5}});
  SelectionResult r = select_greedy(cs, 5);
  EXPECT_EQ(r.selected.size(), 1u);
  EXPECT_DOUBLE_EQ(r.total_utility, 10.0);
}

TEST(SelectGreedy, AdversarialInstanceStaysAboveHalf) {
  // One heavy high-utility item, a trap just behind it, many dense smalls.
  std::vector<std::pair<double, int>> items{{100, 61}, {99, 61}};
  for (int i = 0; i < 40; ++i) items.push_back({2, 1});
  auto cs = synthetic_instance(items);
  SelectionResult dp = select_dp(cs, 100);
  SelectionResult gr = select_greedy(cs, 100);
  ASSERT_GT(dp.total_utility, 0.0);
  double ratio = gr.total_utility / dp.total_utility;
  EXPECT_GE(ratio, 0.5);
  EXPECT_LT(ratio, 0.75); // the bound is doing real work here
}

TEST(SelectGreedy, RandomInstancesWithinRatio) {
  std::mt19937_64 rng(93);
  std::uniform_int_distribution<int> count(1, 25);
  std::uniform_int_distribution<int> weight(1, 40);
  std::uniform_real_distribution<double> utility(0.0, 50.0);
  std::uniform_int_distribution<long> budget(1, 120);
  for (int it = 0; it < 100; ++it) {
    std::vector<std::pair<double, int>> items;
    int k = count(rng);
    for (int i = 0; i < k; ++i) items.push_back({utility(rng), weight(rng)});
    auto cs = synthetic_instance(items);
    long n = budget(rng);
    SelectionResult dp = select_dp(cs, n);
    SelectionResult gr = select_greedy(cs, n);
    EXPECT_LE(gr.total_weight, n);
    EXPECT_LE(gr.total_utility, dp.total_utility + 1e-9);
    if (dp.total_utility > 0)
      EXPECT_GE(gr.total_utility, 0.5 * dp.total_utility - 1e-9) << "it=" << it;
  }
}

TEST(Selection, ShortcutSetKeepsOnlySelected) {
  TDGraph g = generate_graph(20, 2.5, 3, 101);
  TreeDecomposition tree = build_tfp_tree(g);
  CandidateSet cs = build_all_candidates(tree);
  long total = cs.total_weight();
  SelectionResult half = select_greedy(cs, total / 2);
  ShortcutSet set = make_shortcut_set(cs, half, "greedy");
  EXPECT_EQ(set.fns.size(), half.selected.size());
  EXPECT_EQ(set.fingerprint, tree.fingerprint());
  EXPECT_LE(set.total_weight, total / 2);
  for (std::uint32_t idx : half.selected) {
    const auto& p = cs.pairs[idx];
    ASSERT_NE(set.find(p.i, p.j), nullptr);
  }
}

void expect_same_index_state(const TreeDecomposition& a, const TreeDecomposition& b,
                             const CandidateSet& ca, const CandidateSet& cb) {
  ASSERT_EQ(a.n(), b.n());
  for (Vertex v = 1; v <= a.n(); ++v) {
    const TreeNode& na = a.node(v);
    const TreeNode& nb = b.node(v);
    ASSERT_EQ(na.bag, nb.bag);
    for (std::size_t k = 0; k + 1 < na.bag.size(); ++k) {
      for (double t : test::sample_times(16)) {
        ASSERT_NEAR(eval(na.ws[k], t), eval(nb.ws[k], t), 1e-9)
            << "ws " << v << "/" << na.bag[k + 1];
        ASSERT_NEAR(eval(na.wd[k], t), eval(nb.wd[k], t), 1e-9)
            << "wd " << v << "/" << na.bag[k + 1];
      }
    }
  }
  ASSERT_EQ(ca.pairs.size(), cb.pairs.size());
  for (const auto& p : ca.pairs) {
    const PairInstance* q = cb.find(p.i, p.j);
    ASSERT_NE(q, nullptr);
    EXPECT_EQ(p.weight, q->weight);
    for (double t : test::sample_times(16)) {
      ASSERT_NEAR(eval(p.up, t), eval(q->up, t), 1e-9)
          << "pair " << p.i << "->" << p.j;
      ASSERT_NEAR(eval(p.down, t), eval(q->down, t), 1e-9)
          << "pair " << p.j << "->" << p.i;
    }
  }
}

TEST(Update, IdenticalWeightIsNoOp) {
  TDGraph g = generate_graph(15, 2.5, 3, 111);
  TreeDecomposition tree = build_tfp_tree(g);
  CandidateSet cs = build_all_candidates(tree);
  std::uint64_t fp = tree.fingerprint();
  Vertex u = 1;
  Vertex v = tree.graph().out(u).begin()->first;
  PLF same = *tree.graph().find_edge(u, v);
  std::vector<PLF> ups_before;
  for (const auto& p : cs.pairs) ups_before.push_back(p.up);
  update_edge(tree, cs, u, v, same);
  EXPECT_EQ(tree.fingerprint(), fp);
  for (std::size_t i = 0; i < cs.pairs.size(); ++i)
    EXPECT_TRUE(cs.pairs[i].up.identical(ups_before[i]));
}

TEST(Update, SingleEdgeMatchesRebuild) {
  std::mt19937_64 rng(113);
  TDGraph g = generate_graph(30, 3.0, 3, 115);
  TreeDecomposition tree = build_tfp_tree(g);
  CandidateSet cs = build_all_candidates(tree);

  // pick a real edge and replace its weight
  std::uniform_int_distribution<Vertex> any(1, g.n());
  Vertex u = any(rng);
  while (g.out(u).empty()) u = any(rng);
  Vertex v = g.out(u).begin()->first;
  PLF fresh = detail::random_edge_plf(rng, 4);

  update_edge(tree, cs, u, v, fresh);

  TDGraph g2 = g;
  g2.replace_edge(u, v, fresh);
  TreeDecomposition tree2 = build_tfp_tree(g2);
  CandidateSet cs2 = build_all_candidates(tree2);
  expect_same_index_state(tree, tree2, cs, cs2);
  EXPECT_EQ(tree.fingerprint(), tree2.fingerprint());
}

TEST(Update, BatchMatchesRebuild) {
  std::mt19937_64 rng(117);
  TDGraph g = generate_graph(30, 3.0, 3, 119);
  TreeDecomposition tree = build_tfp_tree(g);
  CandidateSet cs = build_all_candidates(tree);
  TDGraph updated = g;
  std::uniform_int_distribution<Vertex> any(1, g.n());
  for (int round = 0; round < 10; ++round) {
    Vertex u = any(rng);
    while (updated.out(u).empty()) u = any(rng);
    auto it = updated.out(u).begin();
    std::uniform_int_distribution<int> skip(0, static_cast<int>(updated.out(u).size()) - 1);
    std::advance(it, skip(rng));
    Vertex v = it->first;
    PLF fresh = detail::random_edge_plf(rng, 3);
    update_edge(tree, cs, u, v, fresh);
    updated.replace_edge(u, v, fresh);
  }
  TreeDecomposition tree2 = build_tfp_tree(updated);
  CandidateSet cs2 = build_all_candidates(tree2);
  expect_same_index_state(tree, tree2, cs, cs2);
}

TEST(Update, Errors) {
  TDGraph g = generate_graph(10, 2.0, 2, 121);
  TreeDecomposition tree = build_tfp_tree(g);
  CandidateSet cs = build_all_candidates(tree);
  Vertex u = 1;
  Vertex v = g.out(1).begin()->first;
  // unknown edge
  Vertex missing = kNoVertex;
  for (Vertex w = 1; w <= 10; ++w)
    if (w != u && !g.find_edge(u, w)) {
      missing = w;
      break;
    }
  ASSERT_NE(missing, kNoVertex);
  EXPECT_THROW(update_edge(tree, cs, u, missing, PLF::constant(5)), UnknownEdge);
  // stale candidates
  CandidateSet stale = cs;
  stale.fingerprint ^= 1;
  EXPECT_THROW(update_edge(tree, stale, u, v, PLF::constant(5)), StaleSelection);
}

}  // namespace
}  // namespace tdsp
