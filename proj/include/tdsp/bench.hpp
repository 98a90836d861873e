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

#ifndef TDSP_BENCH_HPP
#define TDSP_BENCH_HPP

#include <atomic>
#include <chrono>
#include <thread>

#include "tdsp/oracle.hpp"
#include "tdsp/shortcut_query.hpp"

namespace tdsp {

struct BenchRecord {
  std::string method;
  long query_id = 0;
  QueryMode mode = QueryMode::scalar;
  double wall_us = 0.0;
  double cost = kInf;
  bool reachable = false;
  bool correct = true;
};

struct BenchSummary {
  std::string method;
  long queries = 0;
  double median_us = 0.0;
  double mean_us = 0.0;
  double correct_pct = 100.0;
};

struct BenchMethod {
  std::string name;
  const ShortcutSet* shortcuts = nullptr; // null: basic query
};

struct BenchOptions {
  QueryMode mode = QueryMode::scalar;
  int repeats = 10;  // timings per query; the median is recorded
  int threads = 1;
  bool with_oracle = false;
  double tolerance = 1e-6; // relative, for the correct flag
};

struct BenchOutput {
  std::vector<BenchRecord> records;
  std::vector<BenchSummary> summaries;
};

namespace detail {

template <class F>
inline void parallel_for(long n, int threads, F&& f) {
  if (threads <= 1) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int k = 0; k < threads; ++k) {
    pool.emplace_back([&] {
      for (long i; (i = next.fetch_add(1)) < n;) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t mid = xs.size() / 2;
  return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

inline bool costs_agree(bool reach_a, double a, bool reach_b, double b, double tol) {
  if (reach_a != reach_b) return false;
  if (!reach_a) return true;
  return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}

}  // namespace detail

/// Runs every method over every query, timing each `repeats` times and
/// recording the median. Queries are dispatched across worker threads; the
/// shared index is read-only during the run.
inline BenchOutput run_bench(const TreeDecomposition& tree,
                             const std::vector<BenchMethod>& methods,
                             const std::vector<Query>& queries,
                             const BenchOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  BenchOutput out;
  long nq = static_cast<long>(queries.size());

  std::vector<double> oracle_cost(nq, kInf);
  std::vector<char> oracle_reach(nq, 0);
  if (opt.with_oracle) {
    detail::parallel_for(nq, opt.threads, [&](long i) {
      auto best = td_dijkstra(tree.graph(), queries[i].s, queries[i].d, queries[i].t);
      if (best) {
        oracle_cost[i] = best->cost;
        oracle_reach[i] = 1;
      }
    });
  }

  auto bench_method = [&](const std::string& name, auto&& run) {
    std::vector<BenchRecord> recs(nq);
    detail::parallel_for(nq, opt.threads, [&](long i) {
      std::vector<double> times(std::max(1, opt.repeats));
      double cost = kInf;
      bool reachable = false;
      for (int rep = 0; rep < std::max(1, opt.repeats); ++rep) {
        auto t0 = clock::now();
        auto [c, reach] = run(queries[i]);
        auto t1 = clock::now();
        times[rep] =
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count() /
            1000.0;
        if (rep == 0) {
          cost = c;
          reachable = reach;
        }
      }
      BenchRecord& r = recs[i];
      r.method = name;
      r.query_id = i;
      r.mode = opt.mode;
      r.wall_us = detail::median_of(times);
      r.cost = cost;
      r.reachable = reachable;
      r.correct = !opt.with_oracle ||
                  detail::costs_agree(reachable, cost, oracle_reach[i],
                                      oracle_cost[i], opt.tolerance);
    });
    BenchSummary sum;
    sum.method = name;
    sum.queries = nq;
    std::vector<double> times(nq);
    double total = 0.0;
    long correct = 0;
    for (long i = 0; i < nq; ++i) {
      times[i] = recs[i].wall_us;
      total += recs[i].wall_us;
      correct += recs[i].correct ? 1 : 0;
    }
    sum.median_us = detail::median_of(times);
    sum.mean_us = nq ? total / nq : 0.0;
    sum.correct_pct = nq ? 100.0 * correct / nq : 100.0;
    out.summaries.push_back(sum);
    out.records.insert(out.records.end(), recs.begin(), recs.end());
  };

  for (const auto& m : methods) {
    if (m.shortcuts) {
      const ShortcutSet* sel = m.shortcuts;
      bench_method(m.name, [&tree, sel, &opt](const Query& q) {
        QueryResult r = query_with_shortcuts(tree, *sel, q.s, q.d, opt.mode, q.t);
        return std::make_pair(r.cost, r.reachable);
      });
    } else {
      bench_method(m.name, [&tree, &opt](const Query& q) {
        QueryResult r = basic_query(tree, q.s, q.d, opt.mode, q.t);
        return std::make_pair(r.cost, r.reachable);
      });
    }
  }
  if (opt.with_oracle) {
    bench_method("oracle", [&tree](const Query& q) {
      auto best = td_dijkstra(tree.graph(), q.s, q.d, q.t);
      return std::make_pair(best ? best->cost : kInf, best.has_value());
    });
  }
  return out;
}

inline void write_bench_records(const std::vector<BenchRecord>& recs,
                                std::ostream& os) {
  os << "method,query_id,mode,wall_us,cost,correct\n";
  for (const auto& r : recs) {
    os << r.method << ',' << r.query_id << ','
       << (r.mode == QueryMode::scalar ? "scalar" : "profile") << ','
       << detail::format_double(r.wall_us) << ','
       << (r.reachable ? detail::format_double(r.cost) : "inf") << ','
       << (r.correct ? 1 : 0) << '\n';
  }
}

inline void write_bench_summaries(const std::vector<BenchSummary>& sums,
                                  std::ostream& os) {
  os << "method,queries,median_us,mean_us,correct_pct\n";
  for (const auto& s : sums) {
    os << s.method << ',' << s.queries << ',' << detail::format_double(s.median_us)
       << ',' << detail::format_double(s.mean_us) << ','
       << detail::format_double(s.correct_pct) << '\n';
  }
}

}  // namespace tdsp

#endif  // TDSP_BENCH_HPP
