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

#include "tdsp/basic_query.hpp"

#include <gtest/gtest.h>

#include <set>

#include "tdsp/generate.hpp"
#include "tdsp/oracle.hpp"
#include "test_util.hpp"

namespace tdsp {
namespace {

TEST(Ascend, RootIsEmpty) {
  TDGraph g = generate_graph(12, 2.5, 3, 4);
  TreeDecomposition tree = build_tfp_tree(g);
  CostTable t = ascend(tree, tree.root(), Direction::from_source);
  EXPECT_TRUE(t.fn.empty());
}

TEST(Ascend, ThreeVertexChainMatchesCompound) {
  TDGraph g(3);
  PLF ab({{0, 100}, {40000, 160}, {86400, 120}});
  PLF ba({{0, 90}, {30000, 150}, {86400, 100}});
  PLF bc({{0, 80}, {20000, 60}, {86400, 70}});
  PLF cb({{0, 85}, {50000, 95}, {86400, 90}});
  g.add_edge(1, 2, ab);
  g.add_edge(2, 1, ba);
  g.add_edge(2, 3, bc);
  g.add_edge(3, 2, cb);
  TreeDecomposition tree = build_tfp_tree(g);
  // vertex 1 or 3 is eliminated first; query from the deepest leaf
  Vertex leaf = tree.node(1).height >= tree.node(3).height ? 1 : 3;
  CostTable t = ascend(tree, leaf, Direction::from_source);
  PLF chain = leaf == 1 ? compound(ab, bc) : compound(cb, ba);
  Vertex far = leaf == 1 ? 3 : 1;
  ASSERT_TRUE(t.fn.count(2));
  ASSERT_TRUE(t.fn.count(far));
  for (double tt : test::sample_times(64)) {
    EXPECT_NEAR(eval(t.fn.at(far), tt), eval(chain, tt), 1e-9);
  }
}

TEST(Ascend, EntriesMatchOracle) {
  for (std::uint64_t seed : {21, 22}) {
    TDGraph g = generate_graph(30, 3.0, 3, seed);
    TreeDecomposition tree = build_tfp_tree(g);
    for (Vertex v = 1; v <= 30; v += 7) {
      CostTable from = ascend(tree, v, Direction::from_source);
      CostTable to = ascend(tree, v, Direction::to_destination);
      for (double t : test::sample_times(16)) {
        auto rows = td_arrivals(g, v, t);
        for (const auto& [u, fn] : from.fn) {
          double want = rows[u] == kInf ? kInf : rows[u] - t;
          if (want == kInf) continue;
          ASSERT_NEAR(eval(fn, t), want, 1e-6) << "v=" << v << " u=" << u;
        }
        for (const auto& [u, fn] : to.fn) {
          auto best = td_dijkstra(g, u, v, t);
          if (!best) continue;
          ASSERT_NEAR(eval(fn, t), best->cost, 1e-6) << "u=" << u << " v=" << v;
        }
      }
    }
  }
}

TEST(AscendScalar, AgreesWithProfileClimb) {
  TDGraph g = generate_graph(25, 3.0, 3, 31);
  TreeDecomposition tree = build_tfp_tree(g);
  for (double t : test::sample_times(4, 0, 80000)) {
    for (Vertex v = 1; v <= 25; v += 5) {
      CostTable sc = ascend_scalar(tree, v, t);
      CostTable pr = ascend(tree, v, Direction::from_source);
      for (const auto& [u, c] : sc.cost) {
        ASSERT_TRUE(pr.fn.count(u));
        ASSERT_NEAR(c, eval(pr.fn.at(u), t), 1e-9);
      }
    }
  }
}

TEST(BasicQuery, SelfQueryIsZero) {
  TDGraph g = generate_graph(10, 2.0, 2, 2);
  TreeDecomposition tree = build_tfp_tree(g);
  QueryResult r = basic_query(tree, 4, 4, QueryMode::scalar, 1000);
  EXPECT_TRUE(r.reachable);
  EXPECT_DOUBLE_EQ(r.cost, 0.0);
  EXPECT_EQ(r.path, (std::vector<Vertex>{4}));
}

TEST(BasicQuery, DiamondMatchesRouteMin) {
  TDGraph g(4);
  g.add_edge(1, 2, PLF({{0, 100}, {40000, 300}, {86400, 120}}));
  g.add_edge(2, 1, PLF({{0, 110}, {40000, 310}, {86400, 130}}));
  g.add_edge(2, 4, PLF({{0, 250}, {30000, 150}, {86400, 260}}));
  g.add_edge(4, 2, PLF({{0, 240}, {30000, 140}, {86400, 250}}));
  g.add_edge(1, 3, PLF({{0, 200}, {50000, 140}, {86400, 210}}));
  g.add_edge(3, 1, PLF({{0, 190}, {50000, 150}, {86400, 220}}));
  g.add_edge(3, 4, PLF({{0, 160}, {20000, 220}, {86400, 150}}));
  g.add_edge(4, 3, PLF({{0, 170}, {20000, 230}, {86400, 160}}));
  TreeDecomposition tree = build_tfp_tree(g);
  for (double t : test::sample_times(32)) {
    double via2 = chain_eval(g, {1, 2, 4}, t);
    double via3 = chain_eval(g, {1, 3, 4}, t);
    QueryResult r = basic_query(tree, 1, 4, QueryMode::scalar, t);
    ASSERT_TRUE(r.reachable);
    EXPECT_NEAR(r.cost, std::min(via2, via3), 1e-9) << "t=" << t;
  }
}

TEST(BasicQuery, MatchesOracleOnRandomGraphs) {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 10; ++it) {
    TDGraph g = generate_graph(10 + 4 * it, 2.0 + (it % 3), 2 + (it % 5), 300 + it);
    TreeDecomposition tree = build_tfp_tree(g);
    std::uniform_int_distribution<Vertex> any(1, g.n());
    std::uniform_real_distribution<double> when(0, 86400);
    for (int q = 0; q < 50; ++q) {
      Vertex s = any(rng), d = any(rng);
      double t = when(rng);
      auto want = td_dijkstra(g, s, d, t);
      QueryResult r = basic_query(tree, s, d, QueryMode::scalar, t);
      ASSERT_EQ(r.reachable, want.has_value());
      if (want) {
        ASSERT_NEAR(r.cost, want->cost, 1e-6 * std::max(1.0, want->cost))
            << "it=" << it << " s=" << s << " d=" << d << " t=" << t;
      }
    }
  }
}

TEST(BasicQuery, ProfileAgreesWithScalar) {
  std::mt19937_64 rng(43);
  TDGraph g = generate_graph(30, 3.0, 3, 51);
  TreeDecomposition tree = build_tfp_tree(g);
  std::uniform_int_distribution<Vertex> any(1, g.n());
  for (int q = 0; q < 25; ++q) {
    Vertex s = any(rng), d = any(rng);
    QueryResult prof = basic_query(tree, s, d, QueryMode::profile);
    for (double t : test::sample_times(16)) {
      QueryResult sc = basic_query(tree, s, d, QueryMode::scalar, t);
      ASSERT_EQ(prof.reachable, sc.reachable);
      if (sc.reachable)
        ASSERT_NEAR(eval(prof.profile, t), sc.cost, 1e-9)
            << "s=" << s << " d=" << d << " t=" << t;
    }
  }
}

TEST(BasicQuery, ProfileSurvivesOracleSweep) {
  std::mt19937_64 rng(49);
  TDGraph g = generate_graph(25, 3.0, 3, 57);
  TreeDecomposition tree = build_tfp_tree(g);
  std::uniform_int_distribution<Vertex> any(1, g.n());
  for (int q = 0; q < 10; ++q) {
    Vertex s = any(rng), d = any(rng);
    QueryResult r = basic_query(tree, s, d, QueryMode::profile);
    if (!r.reachable) continue;
    auto rep = validate_profile(g, s, d, r.profile, 256);
    EXPECT_LE(rep.max_abs_error, 1e-6)
        << "s=" << s << " d=" << d << " worst t=" << rep.t_at_max;
  }
}

TEST(BasicQuery, JoinVertexInCutBag) {
  TDGraph g = generate_graph(30, 3.0, 3, 53);
  TreeDecomposition tree = build_tfp_tree(g);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Vertex> any(1, g.n());
  for (int q = 0; q < 50; ++q) {
    Vertex s = any(rng), d = any(rng);
    QueryResult r = basic_query(tree, s, d, QueryMode::scalar, 3600.0 * (q % 24));
    if (!r.reachable) continue;
    const auto& bag = tree.lca(s, d).bag;
    EXPECT_NE(std::find(bag.begin(), bag.end(), r.join_vertex), bag.end());
  }
}

TEST(BasicQuery, UnreachableDirected) {
  TDGraph g(3);
  g.add_edge(1, 2, PLF::constant(5));
  g.add_edge(2, 1, PLF::constant(5));
  g.add_edge(2, 3, PLF::constant(5));
  // no edge back from 3
  TreeDecomposition tree = build_tfp_tree(g);
  QueryResult r = basic_query(tree, 3, 1, QueryMode::scalar, 0);
  EXPECT_FALSE(r.reachable);
  QueryResult fwd = basic_query(tree, 1, 3, QueryMode::scalar, 0);
  EXPECT_TRUE(fwd.reachable);
  EXPECT_DOUBLE_EQ(fwd.cost, 10.0);
}

TEST(ReconstructPath, SingleEdge) {
  TDGraph g(2);
  g.add_edge(1, 2, PLF({{0, 10}, {20, 10}, {60, 15}}));
  g.add_edge(2, 1, PLF::constant(11));
  TreeDecomposition tree = build_tfp_tree(g);
  QueryResult r = basic_query(tree, 1, 2, QueryMode::scalar, 0);
  EXPECT_EQ(reconstruct_path(r), (std::vector<Vertex>{1, 2}));
}

TEST(ReconstructPath, RouteSwitchesWithDepartureTime) {
  // Route through 2 wins early; route through 3 wins late.
  TDGraph g(4);
  g.add_edge(1, 2, PLF({{0, 100}, {86400, 100}}));
  g.add_edge(2, 4, PLF({{0, 100}, {43200, 400}, {86400, 400}}));
  g.add_edge(1, 3, PLF({{0, 300}, {86400, 300}}));
  g.add_edge(3, 4, PLF({{0, 50}, {86400, 50}}));
  g.add_edge(2, 1, PLF::constant(100));
  g.add_edge(4, 2, PLF::constant(400));
  g.add_edge(3, 1, PLF::constant(300));
  g.add_edge(4, 3, PLF::constant(50));
  TreeDecomposition tree = build_tfp_tree(g);

  QueryResult early = basic_query(tree, 1, 4, QueryMode::scalar, 0);
  auto oracle_early = td_dijkstra(g, 1, 4, 0);
  ASSERT_TRUE(oracle_early.has_value());
  EXPECT_EQ(reconstruct_path(early), oracle_early->vertices);
  EXPECT_EQ(early.path, (std::vector<Vertex>{1, 2, 4}));

  QueryResult late = basic_query(tree, 1, 4, QueryMode::scalar, 80000);
  auto oracle_late = td_dijkstra(g, 1, 4, 80000);
  ASSERT_TRUE(oracle_late.has_value());
  EXPECT_EQ(reconstruct_path(late), oracle_late->vertices);
  EXPECT_EQ(late.path, (std::vector<Vertex>{1, 3, 4}));
}

TEST(ReconstructPath, CorruptProvenanceDetected) {
  TDGraph g = generate_graph(12, 2.5, 3, 61);
  TreeDecomposition tree = build_tfp_tree(g);
  // a hop whose recorded intermediate vertex cannot connect the endpoints
  Vertex z = tree.root();
  Vertex from = kNoVertex, to = kNoVertex;
  for (Vertex v = 1; v <= 12 && from == kNoVertex; ++v) {
    if (v == z || tree.node(z).bag_index(v) >= 0) continue;
    for (Vertex w = 1; w <= 12; ++w) {
      if (w == v || w == z) continue;
      from = v;
      to = w;
      break;
    }
  }
  ASSERT_NE(from, kNoVertex);
  PLF bogus({{0, 10}, {86400, 10}}, {z});
  std::vector<Vertex> out;
  EXPECT_THROW(detail::unpack_hop(tree, bogus, from, to, 0.0, out, 0),
               CorruptProvenance);
}

TEST(ReconstructPath, ChainEvaluationReproducesCost) {
  std::mt19937_64 rng(47);
  for (int it = 0; it < 10; ++it) {
    TDGraph g = generate_graph(25, 3.0, 3, 400 + it);
    TreeDecomposition tree = build_tfp_tree(g);
    std::uniform_int_distribution<Vertex> any(1, g.n());
    std::uniform_real_distribution<double> when(0, 86400);
    for (int q = 0; q < 20; ++q) {
      Vertex s = any(rng), d = any(rng);
      double t = when(rng);
      QueryResult r = basic_query(tree, s, d, QueryMode::scalar, t);
      if (!r.reachable) continue;
      const auto& path = reconstruct_path(r);
      ASSERT_GE(path.size(), 1u);
      EXPECT_EQ(path.front(), s);
      EXPECT_EQ(path.back(), d);
      EXPECT_NEAR(chain_eval(g, path, t), r.cost, 1e-9);
    }
  }
}

}  // namespace
}  // namespace tdsp
