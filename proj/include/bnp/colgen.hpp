#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bnp/lp.hpp"
#include "bnp/model.hpp"
#include "bnp/pricing.hpp"

namespace bnp {

enum class Provenance { Initial, Priced, SharedRepriced };

const char* provenance_name(Provenance p);

struct Column {
  int block = 0;
  Design design;
  double cost = 0.0;
  Provenance provenance = Provenance::Priced;
};

enum class CutStyle { NoGood, MonotoneStage };

struct InfeasibleColumn {
  int block = 0;
  Design design;
  CutStyle cut = CutStyle::NoGood;
};

/// Every column ever generated. Columns are keyed by (block, design); a
/// repeated key keeps the lowest cost seen. Designs proven infeasible for a
/// block live in a separate set and never enter the master.
class ColumnPool {
 public:
  struct AddResult {
    int index = -1;
    /// New column, or an existing one whose cost went down.
    bool changed = false;
  };

  AddResult add(Column c);
  std::optional<int> find(int block, const Design& design) const;
  /// Returns false if (block, design) was already marked.
  bool mark_infeasible(int block, const Design& design, CutStyle cut);
  bool is_infeasible(int block, const Design& design) const;

  int size() const { return static_cast<int>(columns_.size()); }
  const Column& operator[](int k) const { return columns_[k]; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<InfeasibleColumn>& infeasible() const { return infeasible_; }

 private:
  std::vector<Column> columns_;
  std::map<std::pair<int, Design>, int> index_;
  std::vector<InfeasibleColumn> infeasible_;
  std::map<std::pair<int, Design>, int> infeasible_index_;
};

/// Bound on an aggregated original of block `block` (index into the model's
/// block list): sum_k lambda_ik * ybar_ikj (sense) value.
struct BranchBound {
  int block = 0;
  int component = 0;
  Sense sense = Sense::Le;  // Le or Ge
  std::int64_t value = 0;
};

/// Node-local restrictions. Empty x bound vectors mean the model's bounds.
struct NodeBounds {
  std::vector<BranchBound> y;
  std::vector<double> x_lo;
  std::vector<double> x_hi;
};

/// y-box of block `index` after applying node bounds; nullopt if empty.
std::optional<YBounds> node_y_box(const Block& block, int index, const NodeBounds& node);
bool design_allowed(const Block& block, int index, const Design& design, const NodeBounds& node);
/// Master convexity sense of a block at a node: <= only if the empty design
/// (y = 0) is admissible there.
Sense convexity_sense(const Block& block, int index, const NodeBounds& node);

/// Linear master row over aggregated originals of several blocks.
struct AggregateRow {
  struct Term {
    int block;
    int component;
    double coef;
  };
  std::vector<Term> terms;
  Sense sense = Sense::Eq;
  double rhs = 0.0;
};

/// Restricted master LP together with the bookkeeping to read it back.
///
/// Row order: complicating rows, aggregate rows (non-anticipativity, then
/// branching bounds), one convexity row per block.
/// Column order: x, then one lambda per selected pool column.
struct RmpLp {
  LinearProgram lp;
  int num_x = 0;
  std::vector<int> lambda_pool;  // LP column num_x + k -> pool index
  std::vector<AggregateRow> aggregate_rows;
  int agg_row0 = 0;
  int conv_row0 = 0;
  std::vector<Sense> conv_sense;
};

RmpLp build_rmp_lp(const StructuredModel& model, const NodeBounds& node, const ColumnPool& pool);

struct DualPrices {
  std::vector<double> pi;   // complicating rows
  std::vector<double> agg;  // aggregate rows
  std::vector<double> mu;   // convexity rows
};

DualPrices extract_duals(const RmpLp& rmp, const LpSolution& sol);

/// The price vector block i sees: D_i^T pi plus aggregate-row contributions.
BlockPrices block_prices(const StructuredModel& model, const RmpLp& rmp, const DualPrices& duals, int block,
                         double cost_weight = 1.0);

/// Column from a pricing incumbent; cost = u + w^T ybar + mu, an upper bound
/// on the true cost. Throws std::invalid_argument unless u < 0.
Column column_from_pricing(int block, const PricingResult& result, const BlockPrices& prices);

enum class InitStrategy { SingletonDesigns, ZeroDualPricing };

struct InitResult {
  ColumnPool pool;
  bool master_feasible = false;
  std::string error;

  bool ok() const { return error.empty(); }
};

InitResult init_columns(const ValidatedModel& model, InitStrategy strategy, const PricingOptions& pricing = {});

/// Appends a cut excluding `design` from the block's feasible set.
/// MonotoneStage requires block.monotone and adds auxiliary binaries to z.
void add_infeasibility_cut(Block& block, const Design& design, CutStyle style);

struct SharedPricing {
  std::vector<std::optional<double>> cost;  // per block; nullopt = infeasible there
  std::vector<bool> newly_infeasible;
  int columns_added = 0;
};

/// Prices one design in every block with y fixed. Feasible blocks receive a
/// column; infeasible ones are recorded in the pool and get a cut.
SharedPricing price_shared_column(const Design& design, std::vector<Block>& blocks, ColumnPool& pool,
                                  const PricingOptions& pricing);

struct ColgenOptions {
  double eps = 1e-6;
  double column_tol = 1e-9;
  PricingOptions pricing;
  /// Start each round in budget mode (pricing.node_budget) before escalating.
  bool budget_first = true;
  int stall_limit = 10;
  long max_iterations = 100000;
  int workers = 1;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct ColgenTraceRow {
  int iter = 0;
  bool phase1 = false;
  double v_rmp = 0.0;
  /// Sum of the blocks' lower-bound contributions (l_i, or min(l_i, -mu_i)
  /// for <= convexity rows).
  double sum_l = 0.0;
  double lb = -kInf;
  double ub = kInf;
  int columns_added = 0;
  PricingMode mode = PricingMode::Exact;
  double wallclock_ms = 0.0;
};

enum class ColgenStatus {
  Converged,
  /// Bounds are valid but the gap could not be closed (pricing limits).
  GapOpen,
  Infeasible,
  Pruned,
  Limit,
};

const char* status_name(ColgenStatus s);

struct RelaxedMpResult {
  ColgenStatus status = ColgenStatus::Limit;
  double v = kInf;   // v^RMP at termination (upper bound)
  double lb = -kInf;
  double ub = kInf;
  RmpLp rmp;
  LpSolution lp;
  std::vector<ColgenTraceRow> trace;
  int iterations = 0;
  int columns_added = 0;
  long pricing_calls = 0;
};

/// Shared state of one model's solve: working blocks accumulate
/// infeasibility cuts, the pool accumulates columns across nodes.
struct MasterState {
  ValidatedModel model;
  std::vector<Block> blocks;
  ColumnPool pool;

  explicit MasterState(ValidatedModel m) : model(std::move(m)), blocks(model->blocks) {}
};

using EarlyPrune = std::function<bool(double running_lb)>;

RelaxedMpResult solve_relaxed_mp(MasterState& state, const NodeBounds& node, const ColgenOptions& options,
                                 const EarlyPrune& early_prune = {});

/// Sum of block lower-bound contributions used in LB = v + sum.
double lower_bound_contribution(Sense conv_sense, double l, double mu);

}  // namespace bnp
