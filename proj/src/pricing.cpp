#include "bnp/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bnp {

const char* status_name(PricingStatus s) {
  switch (s) {
    case PricingStatus::Optimal: return "optimal";
    case PricingStatus::BoundsOnly: return "bounds-only";
    case PricingStatus::Infeasible: return "infeasible";
  }
  return "?";
}

std::vector<double> linking_prices(const Block& block, std::span<const double> pi) {
  if (static_cast<int>(pi.size()) != block.linking_rows) {
    throw std::invalid_argument("linking_prices: pi has " + std::to_string(pi.size()) + " entries, block links " +
                                std::to_string(block.linking_rows) + " rows");
  }
  std::vector<double> w(static_cast<std::size_t>(block.num_y()), 0.0);
  for (const auto& e : block.linking) w[e.col] += pi[e.row] * e.value;
  return w;
}

Expr build_pricing_objective(const Block& block, std::span<const double> pi, double mu) {
  return build_pricing_objective(block, BlockPrices{linking_prices(block, pi), mu, 1.0});
}

Expr build_pricing_objective(const Block& block, const BlockPrices& prices) {
  std::vector<Expr> terms;
  if (prices.cost_weight == 1.0) {
    terms.push_back(block.objective);
  } else if (prices.cost_weight != 0.0) {
    terms.push_back(prices.cost_weight * block.objective);
  }
  for (int j = 0; j < block.num_y(); ++j) {
    const double w = prices.y_price[j];
    if (w != 0.0) terms.push_back(Expr::constant(-w) * Expr::variable(j));
  }
  if (prices.mu != 0.0) terms.push_back(Expr::constant(-prices.mu));
  if (terms.empty()) return Expr::constant(0.0);
  if (terms.size() == 1) return terms[0];
  return sum(std::move(terms));
}

namespace {

bool y_box(const Block& block, const std::optional<YBounds>& yb, Design& lo, Design& hi) {
  lo = block.y_lo;
  hi = block.y_hi;
  if (yb) {
    for (int j = 0; j < block.num_y(); ++j) {
      lo[j] = std::max(lo[j], yb->lo[j]);
      hi[j] = std::min(hi[j], yb->hi[j]);
    }
  }
  for (int j = 0; j < block.num_y(); ++j) {
    if (lo[j] > hi[j]) return false;
  }
  return true;
}

}  // namespace

PricingResult solve_pricing(const Block& block, const BlockPrices& prices, const PricingOptions& options,
                            const std::optional<YBounds>& y_bounds) {
  PricingResult out;
  Design lo, hi;
  if (!y_box(block, y_bounds, lo, hi)) {
    out.lower = kInf;
    return out;
  }
  GlobalProblem gp;
  for (int j = 0; j < block.num_y(); ++j) {
    gp.bounds.emplace_back(static_cast<double>(lo[j]), static_cast<double>(hi[j]));
    gp.integer.push_back(true);
  }
  for (const auto& z : block.z) {
    gp.bounds.emplace_back(z.lo, z.hi);
    gp.integer.push_back(z.kind == VarKind::Integer);
  }
  gp.objective = build_pricing_objective(block, prices);
  gp.constraints = block.constraints;

  GlobalOptions go;
  go.node_limit = options.mode == PricingMode::Budget ? options.node_budget : options.exact_node_limit;
  go.gap = options.gap;
  go.feasibility_tol = options.feasibility_tol;
  const GlobalResult r = solve_global(gp, go);

  out.nodes = r.nodes;
  out.prunes = r.prunes;
  out.upper = r.upper;
  out.lower = r.lower;
  switch (r.status) {
    case GlobalStatus::Optimal: out.status = PricingStatus::Optimal; break;
    case GlobalStatus::BoundsOnly: out.status = PricingStatus::BoundsOnly; break;
    case GlobalStatus::Infeasible: out.status = PricingStatus::Infeasible; break;
  }
  if (r.has_point()) {
    out.point = r.point;
    out.design.resize(static_cast<std::size_t>(block.num_y()));
    for (int j = 0; j < block.num_y(); ++j) out.design[j] = static_cast<std::int64_t>(std::llround(r.point[j]));
  }
  return out;
}

PricingResult solve_fixed_design(const Block& block, const Design& design, const PricingOptions& options) {
  if (static_cast<int>(design.size()) != block.num_y()) {
    throw std::invalid_argument("solve_fixed_design: design dimension mismatch");
  }
  BlockPrices prices{std::vector<double>(design.size(), 0.0), 0.0, 1.0};
  PricingOptions exact = options;
  exact.mode = PricingMode::Exact;
  return solve_pricing(block, prices, exact, YBounds{design, design});
}

LatticeResult enumerate_lattice(const Block& block, const BlockPrices& prices, const std::optional<YBounds>& y_bounds,
                                double feasibility_tol) {
  const int p = block.num_y();
  std::vector<int> int_z;
  for (int k = 0; k < block.num_z(); ++k) {
    const auto& z = block.z[k];
    if (z.kind == VarKind::Integer) {
      int_z.push_back(k);
    } else if (!z.closed_form) {
      throw std::invalid_argument("enumerate_lattice: block " + std::to_string(block.id) + " has continuous z" +
                                  std::to_string(k) + " without a closed form");
    }
  }
  LatticeResult best;
  Design lo, hi;
  if (!y_box(block, y_bounds, lo, hi)) return best;

  // Odometer over y then integer z; the last coordinate moves fastest.
  std::vector<double> zlo, zhi;
  for (int k : int_z) {
    zlo.push_back(std::ceil(block.z[k].lo));
    zhi.push_back(std::floor(block.z[k].hi));
  }
  const int nd = p + static_cast<int>(int_z.size());
  std::vector<double> cur(nd), first(nd), last(nd);
  for (int j = 0; j < p; ++j) {
    first[j] = static_cast<double>(lo[j]);
    last[j] = static_cast<double>(hi[j]);
  }
  for (std::size_t k = 0; k < int_z.size(); ++k) {
    first[p + k] = zlo[k];
    last[p + k] = zhi[k];
  }
  cur = first;
  std::vector<double> pt(static_cast<std::size_t>(block.num_vars()), 0.0);
  while (true) {
    for (int j = 0; j < p; ++j) pt[j] = cur[j];
    for (std::size_t k = 0; k < int_z.size(); ++k) pt[p + int_z[k]] = cur[p + k];
    bool ok = true;
    try {
      const std::span<const double> ys(pt.data(), static_cast<std::size_t>(p));
      for (int k = 0; k < block.num_z() && ok; ++k) {
        const auto& z = block.z[k];
        if (z.kind == VarKind::Continuous) {
          const double v = eval_expr(*z.closed_form, ys);
          ok = v >= z.lo - feasibility_tol && v <= z.hi + feasibility_tol;
          pt[p + k] = v;
        }
      }
      for (const auto& g : block.constraints) {
        if (!ok) break;
        ok = eval_expr(g, pt) <= feasibility_tol;
      }
      if (ok) {
        double v = prices.cost_weight == 0.0 ? 0.0 : prices.cost_weight * eval_expr(block.objective, pt);
        for (int j = 0; j < p; ++j) v -= prices.y_price[j] * pt[j];
        v -= prices.mu;
        if (!best.feasible || v < best.value) {
          best.feasible = true;
          best.value = v;
          best.point = pt;
          best.design.assign(lo.size(), 0);
          for (int j = 0; j < p; ++j) best.design[j] = static_cast<std::int64_t>(cur[j]);
        }
      }
    } catch (const EvalError&) {
      // outside the domain: infeasible point
    }
    int k = nd - 1;
    while (k >= 0 && cur[k] >= last[k]) {
      cur[k] = first[k];
      --k;
    }
    if (k < 0) break;
    cur[k] += 1.0;
  }
  return best;
}

}  // namespace bnp
