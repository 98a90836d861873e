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

#ifndef TDSP_GENERATE_HPP
#define TDSP_GENERATE_HPP

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "tdsp/graph.hpp"

namespace tdsp {
namespace detail {

// Diurnal edge weight: log-uniform base cost perturbed sinusoidally across
// the day, c evenly spaced breakpoints, slopes clipped to stay >= -0.9.
inline PLF random_edge_plf(std::mt19937_64& rng, int c) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double base = std::exp(std::log(30.0) + u01(rng) * (std::log(600.0) - std::log(30.0)));
  double amp = base * (0.05 + 0.35 * u01(rng));
  double phase = u01(rng) * 2.0 * M_PI;
  std::vector<Breakpoint> pts;
  pts.reserve(c);
  for (int i = 0; i < c; ++i) {
    double t = kDayBegin + (kDayEnd - kDayBegin) * i / (c - 1);
    double cost = base + amp * std::sin(2.0 * M_PI * t / (kDayEnd - kDayBegin) + phase);
    if (i > 0) {
      double dt = t - pts.back().t;
      if (cost < pts.back().c - 0.9 * dt) cost = pts.back().c - 0.9 * dt;
    }
    pts.push_back({t, cost});
  }
  return PLF(std::move(pts));
}

inline void check_breakpoint_count(int c) {
  if (c < 2 || c > 6)
    throw InfeasibleParameters("breakpoints per edge must be in [2, 6]");
}

}  // namespace detail

/// Connected random directed graph: a random attachment tree plus extra
/// pairs up to ~n*avg_degree/2 undirected pairs, each pair realized as two
/// directed edges with independent weights. Deterministic per seed.
inline TDGraph generate_graph(int n, double avg_degree, int c, std::uint64_t seed) {
  if (n < 2) throw InfeasibleParameters("need at least 2 vertices");
  detail::check_breakpoint_count(c);
  long target_pairs = std::lround(n * avg_degree / 2.0);
  long max_pairs = static_cast<long>(n) * (n - 1) / 2;
  if (target_pairs < n - 1)
    throw InfeasibleParameters("average degree too small for a connected graph");
  if (target_pairs > max_pairs)
    throw InfeasibleParameters("average degree exceeds a complete graph");

  std::mt19937_64 rng(seed);
  std::vector<std::pair<Vertex, Vertex>> pairs;
  pairs.reserve(target_pairs);
  std::vector<std::vector<char>> have(n + 1, std::vector<char>(n + 1, 0));
  auto add_pair = [&](Vertex a, Vertex b) {
    if (a > b) std::swap(a, b);
    if (have[a][b]) return false;
    have[a][b] = 1;
    pairs.emplace_back(a, b);
    return true;
  };

  for (Vertex v = 2; v <= n; ++v) {
    std::uniform_int_distribution<Vertex> pick(1, v - 1);
    add_pair(pick(rng), v);
  }
  std::uniform_int_distribution<Vertex> any(1, n);
  while (static_cast<long>(pairs.size()) < target_pairs) {
    Vertex a = any(rng), b = any(rng);
    if (a != b) add_pair(a, b);
  }

  TDGraph g(n);
  for (auto [a, b] : pairs) {
    g.add_edge(a, b, detail::random_edge_plf(rng, c));
    g.add_edge(b, a, detail::random_edge_plf(rng, c));
  }
  return g;
}

/// rows x cols lattice with 4-neighborhoods, both directions per adjacency.
inline TDGraph generate_grid_graph(int rows, int cols, int c, std::uint64_t seed) {
  if (rows < 1 || cols < 1 || static_cast<long>(rows) * cols < 2)
    throw InfeasibleParameters("grid too small");
  detail::check_breakpoint_count(c);
  std::mt19937_64 rng(seed);
  int n = rows * cols;
  TDGraph g(n);
  auto id = [cols](int r, int col) { return static_cast<Vertex>(r * cols + col + 1); };
  for (int r = 0; r < rows; ++r) {
    for (int col = 0; col < cols; ++col) {
      if (col + 1 < cols) {
        g.add_edge(id(r, col), id(r, col + 1), detail::random_edge_plf(rng, c));
        g.add_edge(id(r, col + 1), id(r, col), detail::random_edge_plf(rng, c));
      }
      if (r + 1 < rows) {
        g.add_edge(id(r, col), id(r + 1, col), detail::random_edge_plf(rng, c));
        g.add_edge(id(r + 1, col), id(r, col), detail::random_edge_plf(rng, c));
      }
    }
  }
  return g;
}

/// Random workload: `pairs` distinct-endpoint vertex pairs, each queried
/// once per time interval with a departure drawn uniformly inside that
/// interval's slice of the day.
inline std::vector<Query> gen_queries(const TDGraph& g, int pairs, int intervals,
                                      std::uint64_t seed) {
  if (pairs < 1 || intervals < 1)
    throw InfeasibleParameters("need at least one pair and one interval");
  if (g.n() < 2) throw InfeasibleParameters("graph too small for queries");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Vertex> any(1, g.n());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double span = (g.t_end() - g.t_begin()) / intervals;
  std::vector<Query> qs;
  qs.reserve(static_cast<std::size_t>(pairs) * intervals);
  for (int p = 0; p < pairs; ++p) {
    Vertex s = any(rng), d = any(rng);
    while (d == s) d = any(rng);
    for (int i = 0; i < intervals; ++i) {
      double t = g.t_begin() + (i + u01(rng)) * span;
      qs.push_back({s, d, t});
    }
  }
  return qs;
}

}  // namespace tdsp

#endif  // TDSP_GENERATE_HPP
