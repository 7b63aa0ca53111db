#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnp/colgen.hpp"
#include "bnp/model.hpp"

namespace bnp {

/// Aggregated originals of a node LP solution.
struct AggregateReport {
  /// y_hat_i = sum_k lambda_ik ybar_ik per block; an unused <= convexity
  /// share stands for the zero design.
  std::vector<std::vector<double>> y_hat;
  double max_fractionality = 0.0;
  int block = -1;
  int component = -1;
  /// Some block mixes distinct designs (the empty design included).
  bool lambda_fractional = false;
  /// Per block, the design selected when the block's lambda is integral
  /// (nullopt for the empty design or a mixed block).
  std::vector<std::optional<int>> chosen;  // pool index
  std::vector<bool> mixed;
};

AggregateReport aggregate_originals(const StructuredModel& model, const RmpLp& rmp, const std::vector<double>& primal,
                                    const ColumnPool& pool, double tol = 1e-6);

enum class BranchRule { MostFractional, LargestEntityFirst };

const char* rule_name(BranchRule r);

/// Children: component <= floor and component >= floor + 1, on `block` (on
/// every block in non-anticipativity mode).
struct BranchDecision {
  int block = 0;
  int component = 0;
  std::int64_t floor_value = 0;
  /// Split of a block whose lambda is fractional while y_hat is integral.
  bool lambda_fallback = false;
};

/// Throws std::logic_error when y_hat and lambda are both integral.
BranchDecision choose_branch(const AggregateReport& report, const StructuredModel& model, const RmpLp& rmp,
                             const std::vector<double>& primal, const ColumnPool& pool, BranchRule rule,
                             double tol = 1e-6);

/// Pool indices whose designs satisfy every node bound.
std::vector<int> filter_columns(const StructuredModel& model, const NodeBounds& node, const ColumnPool& pool);

/// Closed comparison: prune iff running_lb >= ub - max(gap * |ub|, abs_gap).
bool early_prune(double running_lb, double ub, double gap, double abs_gap = 0.0);

enum class NodeStatus { Open, Pruned, Branched, Integral, Infeasible, Unresolved };

const char* status_name(NodeStatus s);

struct BnpNode {
  int id = 0;
  int parent = -1;
  int depth = 0;
  NodeBounds bounds;
  double lb = -kInf;
  NodeStatus status = NodeStatus::Open;
};

struct RecoveredBlock {
  /// True when a <= convexity block selected no column (zero design).
  bool empty = false;
  Design y;
  std::vector<double> z;
  double cost = 0.0;
};

struct Incumbent {
  std::vector<double> x;
  /// (pool index, value) of the selected columns.
  std::vector<std::pair<int, double>> lambda;
  std::vector<RecoveredBlock> blocks;
  /// Master objective of the selection with stored column costs.
  double master_objective = kInf;
  /// c^T x + sum of recovered block costs; the UB.
  double objective = kInf;
};

/// Re-solves each chosen design exactly to recover z. Returns nullopt if a
/// chosen design turns out infeasible. Stored costs above the recovered ones
/// are lowered in the pool.
std::optional<Incumbent> recover_original_solution(const StructuredModel& model, const RmpLp& rmp,
                                                   const std::vector<double>& primal, ColumnPool& pool,
                                                   const PricingOptions& pricing = {});

/// Max violation of the complicating rows and block constraints of a recovered point.
double incumbent_violation(const StructuredModel& model, const Incumbent& inc);

struct BnpOptions {
  /// Relative gap; infinity stops at the first incumbent.
  double gap = 1e-3;
  /// Absolute floor on the gap for objectives near zero.
  double abs_gap = 1e-9;
  long node_limit = 100000;
  std::optional<double> time_limit_s;
  BranchRule rule = BranchRule::MostFractional;
  ColgenOptions colgen;
  std::optional<InitStrategy> init;  // default: singleton designs if declared, else zero-dual pricing
  bool rmp_milp_heuristic = true;
  long heuristic_node_limit = 5000;
};

struct TreeLogRow {
  int node = 0;
  int parent = -1;
  int depth = 0;
  double lb = -kInf;
  double ub_after = kInf;
  int columns_in_pool = 0;
  NodeStatus status = NodeStatus::Open;
  double wallclock_ms = 0.0;
};

enum class BnpStatus { Optimal, Limit, Infeasible };

const char* status_name(BnpStatus s);

struct BnpResult {
  BnpStatus status = BnpStatus::Limit;
  std::optional<Incumbent> incumbent;
  double lb = -kInf;
  double ub = kInf;
  int nodes = 0;
  int max_depth = 0;
  long colgen_iterations = 0;
  long columns_generated = 0;
  long pricing_calls = 0;
  int pool_size = 0;
  bool root_fractional = false;
  /// Root relaxation bounds.
  double root_lb = -kInf;
  double root_v = kInf;
  std::vector<TreeLogRow> tree;
  std::vector<ColgenTraceRow> colgen_trace;  // all nodes, in order
  std::vector<InfeasibleColumn> infeasible_columns;
  /// Final column pool.
  std::vector<Column> columns;
  /// Constraints appended to each block by infeasibility cuts.
  std::vector<int> cut_rows;
  int lambda_branches = 0;
  std::string message;
  double wallclock_ms = 0.0;

  double gap() const;
};

BnpResult solve_bnp(const ValidatedModel& model, const BnpOptions& options = {});

std::string tree_log_csv(const std::vector<TreeLogRow>& rows);
std::string colgen_log_csv(const std::vector<ColgenTraceRow>& rows);

}  // namespace bnp
