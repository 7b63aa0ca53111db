#pragma once

#include <span>
#include <string>
#include <vector>

#include "bnp/types.hpp"

namespace bnp {

/// min objective^T x + offset  s.t.  rows (sense) rhs,  lower <= x <= upper.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Sense> senses;
  std::vector<double> rhs;
  std::vector<SparseEntry> entries;  // (row, col, value)
  double objective_offset = 0.0;

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  int add_column(double cost, double lo = 0.0, double hi = kInf);
  int add_row(Sense sense, double rhs_value);
  void set(int row, int col, double value) { entries.push_back({row, col, value}); }

  /// Throws std::invalid_argument when dimensions or bounds are inconsistent.
  void validate() const;
};

enum class LpStatus {
  Optimal,
  Infeasible,
  Unbounded,
  /// Iteration or node limit reached; for MILP a feasible point may be present.
  Limit,
};

const char* status_name(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;
  /// One dual per row. For a minimization, >= rows carry nonnegative duals,
  /// <= rows nonpositive ones, = rows are free.
  std::vector<double> dual;
  std::vector<double> reduced_costs;
  double objective = 0.0;
  /// MILP only: best proven lower bound.
  double bound = -kInf;
  long iterations = 0;
  long nodes = 0;
  bool has_point = false;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  long max_iterations = 200000;
  /// Iterations without objective progress, as a multiple of the row count,
  /// before switching to smallest-index pivoting.
  int bland_after_factor = 10;
  int refactor_every = 64;
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

struct MilpOptions {
  double rel_gap = 1e-9;
  double abs_gap = 1e-9;
  double integrality_tol = 1e-6;
  long node_limit = 200000;
  SimplexOptions lp;
};

/// LP-based branch-and-bound. Masked entries of the returned point are exactly integral.
LpSolution solve_milp(const LinearProgram& lp, const std::vector<bool>& integer_mask, const MilpOptions& options = {});

/// Plain-text dump of a solution (primal, duals, reduced costs) for debugging.
std::string dump_solution(const LinearProgram& lp, const LpSolution& sol);

}  // namespace bnp
