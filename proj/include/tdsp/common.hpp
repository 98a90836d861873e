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

#ifndef TDSP_COMMON_HPP
#define TDSP_COMMON_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace tdsp {

// Vertex ids are 1-based; 0 is reserved as "none" and, in segment
// provenance, marks a direct (original) edge.
using Vertex = std::int32_t;
inline constexpr Vertex kNoVertex = 0;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Travel cost functions live on one day, in seconds.
inline constexpr double kDayBegin = 0.0;
inline constexpr double kDayEnd = 86400.0;

// Slack allowed on the slope >= -1 check when validating external input.
inline constexpr double kFifoSlopeTol = 1e-9;
// Candidate breakpoints this close (seconds) count as the same instant.
// Kept tiny on purpose: a coarser merge can clip a legitimate steep kink;
// value-aware simplification handles coincident-point noise instead.
inline constexpr double kTimeMergeTol = 1e-12;

// Numeric policy for the function kernel.
struct PlfOptions {
  double simplify_eps = 1e-9;         // max pointwise deviation simplify() may introduce
  std::size_t max_breakpoints = 4096; // per-function cap, checked after simplification
};

class TdspError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public TdspError {
 public:
  ParseError(const std::string& msg, long line)
      : TdspError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class FifoViolation : public TdspError {
 public:
  using TdspError::TdspError;
};

class DuplicateEdge : public TdspError {
 public:
  using TdspError::TdspError;
};

class UnknownVertex : public TdspError {
 public:
  using TdspError::TdspError;
};

class UnknownEdge : public TdspError {
 public:
  using TdspError::TdspError;
};

class NotAnAncestor : public TdspError {
 public:
  using TdspError::TdspError;
};

class InfeasibleParameters : public TdspError {
 public:
  using TdspError::TdspError;
};

class BreakpointBudgetExceeded : public TdspError {
 public:
  using TdspError::TdspError;
};

class DisconnectedGraph : public TdspError {
 public:
  using TdspError::TdspError;
};

class StaleSelection : public TdspError {
 public:
  using TdspError::TdspError;
};

class CorruptProvenance : public TdspError {
 public:
  using TdspError::TdspError;
};

// Per-thread counters over the function kernel, used to verify the
// constant-work bound of the direct shortcut join.
struct PlfOpCounts {
  std::uint64_t evals = 0;
  std::uint64_t compounds = 0;
  std::uint64_t mins = 0;
  std::uint64_t total() const { return evals + compounds + mins; }
};

inline PlfOpCounts& plf_op_counts() {
  thread_local PlfOpCounts counts;
  return counts;
}

inline void reset_plf_op_counts() { plf_op_counts() = PlfOpCounts{}; }

}  // namespace tdsp

#endif  // TDSP_COMMON_HPP
