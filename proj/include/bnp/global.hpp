#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "bnp/expr.hpp"
#include "bnp/interval.hpp"

namespace bnp {

/// min objective(v) s.t. constraints(v) <= 0, v in a box, some v integer.
struct GlobalProblem {
  std::vector<Interval> bounds;
  std::vector<bool> integer;
  Expr objective;
  std::vector<Expr> constraints;

  int num_vars() const { return static_cast<int>(bounds.size()); }
};

struct GlobalOptions {
  long node_limit = 2'000'000;
  /// Stop when upper - lower <= gap * (1 + |upper|).
  double gap = 1e-7;
  double feasibility_tol = 1e-8;
  int contraction_passes = 4;
  /// Checked every 64 nodes; reaching it ends the search like the node limit.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class GlobalStatus {
  Optimal,
  /// Node limit reached or boxes too small to resolve; bounds are still valid.
  BoundsOnly,
  Infeasible,
};

const char* status_name(GlobalStatus s);

struct GlobalResult {
  GlobalStatus status = GlobalStatus::Infeasible;
  std::vector<double> point;  // empty when no feasible point was found
  double upper = kInf;
  double lower = -kInf;
  long nodes = 0;
  long prunes = 0;
  long unresolved = 0;

  bool has_point() const { return !point.empty(); }
};

/// Interval spatial branch-and-bound with forward-backward constraint
/// propagation. Returned points satisfy every constraint to feasibility_tol and
/// integrality exactly.
GlobalResult solve_global(const GlobalProblem& problem, const GlobalOptions& options = {});

/// Narrows box to points that may satisfy lo <= expr <= hi. Returns false if
/// no point of the box can.
bool contract(const Expr& expr, Interval target, Box& box);

}  // namespace bnp
