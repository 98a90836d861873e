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

#ifndef TDSP_PLF_HPP
#define TDSP_PLF_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>
#include <vector>

#include "tdsp/common.hpp"

namespace tdsp {

// One interpolation point of a travel cost function: departing at time t
// costs c seconds.
struct Breakpoint {
  double t = 0.0;
  double c = 0.0;

  friend bool operator==(const Breakpoint& a, const Breakpoint& b) {
    return a.t == b.t && a.c == b.c;
  }
};

/// Piecewise linear travel cost function over the day, stored as breakpoints
/// with strictly increasing times. Outside the breakpoint span the function
/// clamps to its boundary costs, which totalizes evaluation. A function may
/// optionally carry per-segment provenance: the id of the vertex that
/// realizes the segment, or kNoVertex for a direct edge.
///
/// Values are immutable after construction; all operations return new
/// functions and are safe to call concurrently.
class PLF {
 public:
  PLF() = default;

  explicit PLF(std::vector<Breakpoint> pts) : pts_(std::move(pts)) {
    validate();
  }

  PLF(std::vector<Breakpoint> pts, std::vector<Vertex> via)
      : pts_(std::move(pts)), via_(std::move(via)), has_via_(true) {
    validate();
  }

  // A constant function stored as one breakpoint.
  static PLF constant(double c, double at = kDayBegin) {
    PLF f;
    f.pts_.push_back({at, c});
    return f;
  }

  static PLF zero() { return constant(0.0); }

  // "Unreached" sentinel: constant +infinity.
  static PLF infinite() { return constant(kInf); }

  // Internal results of compound/min are FIFO by construction; skip the
  // slope re-check, which can false-positive on rounding noise.
  static PLF trusted(std::vector<Breakpoint> pts, std::vector<Vertex> via,
                     bool has_via) {
    PLF f;
    f.pts_ = std::move(pts);
    f.via_ = std::move(via);
    f.has_via_ = has_via;
    assert(!f.pts_.empty());
    assert(!f.has_via_ || f.via_.size() + 1 == f.pts_.size());
    return f;
  }

  const std::vector<Breakpoint>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  bool has_via() const { return has_via_; }
  const std::vector<Vertex>& via() const { return via_; }

  bool is_infinite() const {
    return pts_.size() == 1 && std::isinf(pts_[0].c);
  }

  double first_time() const { return pts_.front().t; }
  double last_time() const { return pts_.back().t; }

  double min_cost() const {
    double m = kInf;
    for (const auto& p : pts_) m = std::min(m, p.c);
    return m;
  }

  double max_cost() const {
    double m = -kInf;
    for (const auto& p : pts_) m = std::max(m, p.c);
    return m;
  }

  // Index of the segment whose [t_i, t_{i+1}] span contains t, clamped to
  // the boundary segments. Only meaningful for size() >= 2.
  std::size_t segment_index(double t) const {
    if (pts_.size() < 2 || t <= pts_.front().t) return 0;
    if (t >= pts_.back().t) return pts_.size() - 2;
    std::size_t lo =
        std::upper_bound(pts_.begin(), pts_.end(), t,
                         [](double x, const Breakpoint& b) { return x < b.t; }) -
        pts_.begin();
    return lo - 1;
  }

  // Provenance label of the segment containing t; kNoVertex when the
  // function has no provenance or is a single point.
  Vertex via_at(double t) const {
    if (!has_via_ || via_.empty()) return kNoVertex;
    return via_[segment_index(t)];
  }

  double operator()(double t) const { return eval_impl(*this, t); }

  // Exact representation equality (used for change detection).
  bool identical(const PLF& o) const {
    return has_via_ == o.has_via_ && pts_ == o.pts_ && via_ == o.via_;
  }

  static double eval_impl(const PLF& f, double t) {
    const auto& pts = f.pts_;
    if (t <= pts.front().t) return pts.front().c;
    if (t >= pts.back().t) return pts.back().c;
    std::size_t i = f.segment_index(t);
    const Breakpoint& a = pts[i];
    const Breakpoint& b = pts[i + 1];
    return a.c + (t - a.t) * (b.c - a.c) / (b.t - a.t);
  }

 private:
  void validate() const {
    if (pts_.empty()) throw TdspError("travel cost function has no breakpoints");
    if (has_via_ && via_.size() + 1 != pts_.size())
      throw TdspError("provenance size does not match segment count");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const auto& p = pts_[i];
      if (std::isnan(p.t) || std::isnan(p.c))
        throw TdspError("NaN in travel cost function");
      if (std::isinf(p.c) && pts_.size() > 1)
        throw TdspError("infinite cost allowed only as a single-point sentinel");
      if (p.c < 0.0) throw TdspError("negative travel cost");
      if (p.t < kDayBegin || p.t > kDayEnd)
        throw TdspError("breakpoint time outside the day");
      if (i > 0) {
        if (pts_[i - 1].t >= p.t)
          throw TdspError("breakpoint times not strictly increasing");
        double slope = (p.c - pts_[i - 1].c) / (p.t - pts_[i - 1].t);
        if (slope < -1.0 - kFifoSlopeTol)
          throw FifoViolation("slope below -1 breaks the FIFO property");
      }
    }
  }

  std::vector<Breakpoint> pts_;
  std::vector<Vertex> via_;
  bool has_via_ = false;
};

inline double eval(const PLF& f, double t) {
  ++plf_op_counts().evals;
  return PLF::eval_impl(f, t);
}

inline std::size_t size(const PLF& f) { return f.size(); }

// Labels every segment with the given vertex, replacing prior provenance.
inline PLF with_via(const PLF& f, Vertex v) {
  if (f.size() < 2) return PLF::trusted(f.points(), {}, true);
  return PLF::trusted(f.points(), std::vector<Vertex>(f.size() - 1, v), true);
}

inline bool fifo_ok(const PLF& f, double tol = kFifoSlopeTol) {
  const auto& pts = f.points();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double slope = (pts[i].c - pts[i - 1].c) / (pts[i].t - pts[i - 1].t);
    if (slope < -1.0 - tol) return false;
  }
  return true;
}

namespace detail {

// Greedy chord fit: drop interior points that stay within eps of the line
// between the surviving neighbors. Points may only merge across segments
// with identical provenance.
inline PLF simplify_impl(const PLF& f, double eps) {
  const auto& pts = f.points();
  if (pts.size() <= 2) return f;
  const bool hv = f.has_via();
  const auto& via = f.via();

  std::vector<std::size_t> keep;
  keep.push_back(0);
  std::size_t anchor = 0;
  while (anchor + 1 < pts.size()) {
    std::size_t end = anchor + 1;
    // Extend the chord as long as every skipped point stays within eps and
    // the run has uniform provenance.
    while (end + 1 < pts.size()) {
      std::size_t cand = end + 1;
      if (hv && via[cand - 1] != via[anchor]) break;
      const Breakpoint& a = pts[anchor];
      const Breakpoint& b = pts[cand];
      bool ok = true;
      for (std::size_t k = anchor + 1; k < cand; ++k) {
        double lin = a.c + (pts[k].t - a.t) * (b.c - a.c) / (b.t - a.t);
        if (std::fabs(pts[k].c - lin) > eps) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      end = cand;
    }
    keep.push_back(end);
    anchor = end;
  }

  if (keep.size() == pts.size()) return f;
  std::vector<Breakpoint> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(pts[i]);
  std::vector<Vertex> out_via;
  if (hv) {
    out_via.reserve(keep.size() - 1);
    for (std::size_t s = 0; s + 1 < keep.size(); ++s)
      out_via.push_back(via[keep[s]]);
  }
  return PLF::trusted(std::move(out), std::move(out_via), hv);
}

inline void push_time(std::vector<double>& ts, double t) {
  if (t < kDayBegin || t > kDayEnd) return;
  ts.push_back(t);
}

inline void sort_merge_times(std::vector<double>& ts) {
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    if (out.empty() || t - out.back() > kTimeMergeTol) out.push_back(t);
  }
  ts.swap(out);
}

// Departure times mapping to arrival tau under a(t) = t + f(t). The arrival
// function is non-decreasing for FIFO f, so a match is an interval or a
// point; one representative per matching region is enough since values are
// recomputed directly at every candidate time.
inline void preimage_times(const PLF& f, double tau, std::vector<double>& out) {
  const auto& pts = f.points();
  const double a_first = pts.front().t + pts.front().c;
  if (tau <= a_first) push_time(out, tau - pts.front().c);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double ai = pts[i].t + pts[i].c;
    double aj = pts[i + 1].t + pts[i + 1].c;
    if (tau < ai || tau > aj) continue;
    if (aj > ai) {
      push_time(out, pts[i].t + (tau - ai) * (pts[i + 1].t - pts[i].t) / (aj - ai));
    } else {
      push_time(out, pts[i].t);
    }
  }
  const double a_last = pts.back().t + pts.back().c;
  if (tau >= a_last) push_time(out, tau - pts.back().c);
}

}  // namespace detail

/// Removes breakpoints that are collinear with their surviving neighbors
/// within eps; adjacent segments merge only when their provenance matches.
inline PLF simplify(const PLF& f, double eps) {
  return detail::simplify_impl(f, eps);
}

/// Travel cost of traversing f then g, the second leg departing when the
/// first arrives: r(t) = f(t) + g(t + f(t)). The result carries no
/// provenance; callers label it (see with_via) when the junction vertex
/// matters. FIFO inputs produce a FIFO result.
inline PLF compound(const PLF& f, const PLF& g, const PlfOptions& opt = {}) {
  ++plf_op_counts().compounds;
  if (f.is_infinite() || g.is_infinite()) return PLF::infinite();

  std::vector<double> ts;
  ts.reserve(f.size() + g.size() + 2);
  ts.push_back(kDayBegin);
  ts.push_back(kDayEnd);
  for (const auto& p : f.points()) detail::push_time(ts, p.t);
  for (const auto& p : g.points()) detail::preimage_times(f, p.t, ts);
  detail::sort_merge_times(ts);

  std::vector<Breakpoint> out;
  out.reserve(ts.size());
  for (double t : ts) {
    double fv = PLF::eval_impl(f, t);
    out.push_back({t, fv + PLF::eval_impl(g, t + fv)});
  }
  PLF r = detail::simplify_impl(PLF::trusted(std::move(out), {}, false),
                                opt.simplify_eps);
  if (r.size() > opt.max_breakpoints)
    throw BreakpointBudgetExceeded("compound result exceeds breakpoint cap");
  return r;
}

/// Pointwise minimum. Crossing points become breakpoints. Each segment of
/// the result is labeled with the provenance of the winning argument: its
/// own per-segment label when it has one, otherwise via_f / via_g. Where
/// both arguments agree on a whole segment the smaller label wins.
inline PLF min_plf(const PLF& f, const PLF& g, Vertex via_f, Vertex via_g,
                   const PlfOptions& opt = {}) {
  ++plf_op_counts().mins;
  if (f.is_infinite()) return g;
  if (g.is_infinite()) return f;

  std::vector<double> ts;
  ts.reserve(f.size() + g.size() + 2);
  ts.push_back(kDayBegin);
  ts.push_back(kDayEnd);
  for (const auto& p : f.points()) detail::push_time(ts, p.t);
  for (const auto& p : g.points()) detail::push_time(ts, p.t);
  detail::sort_merge_times(ts);

  // Insert crossings of f - g strictly inside elementary intervals.
  std::vector<double> all;
  all.reserve(ts.size() * 2);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    all.push_back(ts[i]);
    if (i + 1 == ts.size()) break;
    double da = PLF::eval_impl(f, ts[i]) - PLF::eval_impl(g, ts[i]);
    double db = PLF::eval_impl(f, ts[i + 1]) - PLF::eval_impl(g, ts[i + 1]);
    if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
      double tx = ts[i] + (ts[i + 1] - ts[i]) * da / (da - db);
      if (tx > ts[i] + kTimeMergeTol && tx < ts[i + 1] - kTimeMergeTol)
        all.push_back(tx);
    }
  }

  std::vector<Breakpoint> out;
  out.reserve(all.size());
  for (double t : all)
    out.push_back({t, std::min(PLF::eval_impl(f, t), PLF::eval_impl(g, t))});

  std::vector<Vertex> via(out.size() - 1, kNoVertex);
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    double tm = 0.5 * (out[i].t + out[i + 1].t);
    double fm = PLF::eval_impl(f, tm);
    double gm = PLF::eval_impl(g, tm);
    Vertex lf = f.has_via() ? f.via_at(tm) : via_f;
    Vertex lg = g.has_via() ? g.via_at(tm) : via_g;
    double tol = 1e-12 * std::max({1.0, std::fabs(fm), std::fabs(gm)});
    if (std::fabs(fm - gm) <= tol) {
      via[i] = std::min(lf, lg);
    } else {
      via[i] = fm < gm ? lf : lg;
    }
  }

  return detail::simplify_impl(PLF::trusted(std::move(out), std::move(via), true),
                               opt.simplify_eps);
}

}  // namespace tdsp

#endif  // TDSP_PLF_HPP
