#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bnp/expr.hpp"
#include "bnp/global.hpp"
#include "bnp/model.hpp"

namespace bnp {

/// Linear price vector seen by one block: reduced cost is
/// cost_weight * f(y, z) - sum_j y_price[j] * y_j - mu.
///
/// y_price folds together every master row the block touches (complicating
/// rows through D, plus any node-local rows over aggregated y).
struct BlockPrices {
  std::vector<double> y_price;
  double mu = 0.0;
  /// 1 for ordinary pricing, 0 when hunting for a feasibility-restoring column.
  double cost_weight = 1.0;
};

/// y_price = D_i^T pi.
std::vector<double> linking_prices(const Block& block, std::span<const double> pi);

/// f - (pi^T D) y - mu as an expression over the block's variables.
Expr build_pricing_objective(const Block& block, std::span<const double> pi, double mu);
Expr build_pricing_objective(const Block& block, const BlockPrices& prices);

enum class PricingMode { Exact, Budget };

struct PricingOptions {
  PricingMode mode = PricingMode::Exact;
  long node_budget = 500;
  long exact_node_limit = 2'000'000;
  double gap = 1e-7;
  double feasibility_tol = 1e-8;
};

enum class PricingStatus { Optimal, BoundsOnly, Infeasible };

const char* status_name(PricingStatus s);

struct PricingResult {
  PricingStatus status = PricingStatus::Infeasible;
  /// Incumbent (y then z); empty when none was found.
  std::vector<double> point;
  Design design;
  double upper = kInf;  // u
  double lower = -kInf;  // l
  long nodes = 0;
  long prunes = 0;

  bool has_point() const { return !point.empty(); }
};

/// Optional tightening of the y box (node branching bounds).
struct YBounds {
  Design lo;
  Design hi;
};

PricingResult solve_pricing(const Block& block, const BlockPrices& prices, const PricingOptions& options,
                            const std::optional<YBounds>& y_bounds = std::nullopt);

/// Global minimum of f with y fixed to `design`: the true column cost.
PricingResult solve_fixed_design(const Block& block, const Design& design, const PricingOptions& options);

struct LatticeResult {
  bool feasible = false;
  double value = kInf;
  Design design;
  std::vector<double> point;
};

/// Exhaustive scan of the y lattice (and integer z lattice) in lexicographic
/// order; the first strict minimum wins. Continuous z must carry a closed form.
/// Throws std::invalid_argument otherwise.
LatticeResult enumerate_lattice(const Block& block, const BlockPrices& prices,
                                const std::optional<YBounds>& y_bounds = std::nullopt,
                                double feasibility_tol = 1e-8);

}  // namespace bnp
