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

#ifndef TDSP_ORACLE_HPP
#define TDSP_ORACLE_HPP

#include <optional>
#include <queue>
#include <vector>

#include "tdsp/graph.hpp"

namespace tdsp {

struct OraclePath {
  double cost = 0.0;
  std::vector<Vertex> vertices;
};

namespace detail {

// Label-setting search keyed on arrival times; exact under FIFO weights.
// Fills arrivals (and predecessors when given); stops early at `target`.
inline void td_dijkstra_core(const TDGraph& g, Vertex s, double depart,
                             Vertex target, std::vector<double>& arr,
                             std::vector<Vertex>* pred) {
  arr.assign(g.n() + 1, kInf);
  if (pred) pred->assign(g.n() + 1, kNoVertex);
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  arr[s] = depart;
  pq.push({depart, s});
  std::vector<char> done(g.n() + 1, 0);
  while (!pq.empty()) {
    auto [a, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    if (v == target) return;
    for (const auto& [w, fn] : g.out(v)) {
      if (done[w]) continue;
      double cand = a + PLF::eval_impl(fn, a);
      if (cand < arr[w]) {
        arr[w] = cand;
        if (pred) (*pred)[w] = v;
        pq.push({cand, w});
      }
    }
  }
}

}  // namespace detail

/// Ground-truth scalar query. Returns the path with minimal arrival at d
/// departing s at time t, or nullopt when d is unreachable.
inline std::optional<OraclePath> td_dijkstra(const TDGraph& g, Vertex s, Vertex d,
                                             double t) {
  g.check_vertex(s);
  g.check_vertex(d);
  if (s == d) return OraclePath{0.0, {s}};
  std::vector<double> arr;
  std::vector<Vertex> pred;
  detail::td_dijkstra_core(g, s, t, d, arr, &pred);
  if (arr[d] == kInf) return std::nullopt;
  OraclePath p;
  p.cost = arr[d] - t;
  for (Vertex v = d; v != kNoVertex; v = pred[v]) p.vertices.push_back(v);
  std::reverse(p.vertices.begin(), p.vertices.end());
  return p;
}

/// Arrival times from s to every vertex (kInf where unreachable).
inline std::vector<double> td_arrivals(const TDGraph& g, Vertex s, double t) {
  g.check_vertex(s);
  std::vector<double> arr;
  detail::td_dijkstra_core(g, s, t, kNoVertex, arr, nullptr);
  return arr;
}

/// Cost of walking `path` edge by edge departing at t. Throws UnknownEdge
/// if a hop is not a real edge.
inline double chain_eval(const TDGraph& g, const std::vector<Vertex>& path,
                         double t) {
  double now = t;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const PLF* w = g.find_edge(path[i], path[i + 1]);
    if (!w)
      throw UnknownEdge("path hop " + std::to_string(path[i]) + " -> " +
                        std::to_string(path[i + 1]) + " is not an edge");
    now += PLF::eval_impl(*w, now);
  }
  return now - t;
}

struct ProfileReport {
  double max_abs_error = 0.0;
  double t_at_max = 0.0;
  long samples = 0;
  double tolerance = 0.0;
  bool has_failure = false;
  double first_failing_t = 0.0;
};

/// Compares a claimed cost profile against the scalar oracle at uniformly
/// spaced departure times. Unreachable at both ends counts as agreement.
inline ProfileReport validate_profile(const TDGraph& g, Vertex s, Vertex d,
                                      const PLF& f, long samples = 1024,
                                      double tolerance = 1e-6) {
  if (samples < 1) throw InfeasibleParameters("need at least one sample");
  ProfileReport rep;
  rep.samples = samples;
  rep.tolerance = tolerance;
  for (long i = 0; i < samples; ++i) {
    double t = samples == 1
                   ? g.t_begin()
                   : g.t_begin() + (g.t_end() - g.t_begin()) * i / (samples - 1);
    auto best = td_dijkstra(g, s, d, t);
    double truth = best ? best->cost : kInf;
    double claimed = PLF::eval_impl(f, t);
    double err;
    if (truth == kInf && claimed == kInf) {
      err = 0.0;
    } else if (truth == kInf || claimed == kInf) {
      err = kInf;
    } else {
      err = std::fabs(truth - claimed);
    }
    if (err > rep.max_abs_error) {
      rep.max_abs_error = err;
      rep.t_at_max = t;
    }
    if (err > tolerance && !rep.has_failure) {
      rep.has_failure = true;
      rep.first_failing_t = t;
    }
  }
  return rep;
}

}  // namespace tdsp

#endif  // TDSP_ORACLE_HPP
