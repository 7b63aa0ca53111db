#include "bnp/colgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace bnp {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Initial: return "initial";
    case Provenance::Priced: return "priced";
    case Provenance::SharedRepriced: return "shared-repriced";
  }
  return "?";
}

const char* status_name(ColgenStatus s) {
  switch (s) {
    case ColgenStatus::Converged: return "converged";
    case ColgenStatus::GapOpen: return "gap-open";
    case ColgenStatus::Infeasible: return "infeasible";
    case ColgenStatus::Pruned: return "pruned";
    case ColgenStatus::Limit: return "limit";
  }
  return "?";
}

ColumnPool::AddResult ColumnPool::add(Column c) {
  const auto key = std::make_pair(c.block, c.design);
  if (auto it = index_.find(key); it != index_.end()) {
    Column& old = columns_[it->second];
    if (c.cost < old.cost) {
      old.cost = c.cost;
      return {it->second, true};
    }
    return {it->second, false};
  }
  const int k = size();
  index_.emplace(key, k);
  columns_.push_back(std::move(c));
  return {k, true};
}

std::optional<int> ColumnPool::find(int block, const Design& design) const {
  if (auto it = index_.find({block, design}); it != index_.end()) return it->second;
  return std::nullopt;
}

bool ColumnPool::mark_infeasible(int block, const Design& design, CutStyle cut) {
  const auto key = std::make_pair(block, design);
  if (infeasible_index_.count(key)) return false;
  infeasible_index_.emplace(key, static_cast<int>(infeasible_.size()));
  infeasible_.push_back({block, design, cut});
  return true;
}

bool ColumnPool::is_infeasible(int block, const Design& design) const {
  return infeasible_index_.count({block, design}) > 0;
}

std::optional<YBounds> node_y_box(const Block& block, int index, const NodeBounds& node) {
  YBounds yb{block.y_lo, block.y_hi};
  for (const auto& b : node.y) {
    if (b.block != index) continue;
    if (b.sense == Sense::Le) yb.hi[b.component] = std::min(yb.hi[b.component], b.value);
    if (b.sense == Sense::Ge) yb.lo[b.component] = std::max(yb.lo[b.component], b.value);
  }
  for (int j = 0; j < block.num_y(); ++j) {
    if (yb.lo[j] > yb.hi[j]) return std::nullopt;
  }
  return yb;
}

bool design_allowed(const Block& block, int index, const Design& design, const NodeBounds& node) {
  const auto yb = node_y_box(block, index, node);
  if (!yb) return false;
  for (int j = 0; j < block.num_y(); ++j) {
    if (design[j] < yb->lo[j] || design[j] > yb->hi[j]) return false;
  }
  return true;
}

Sense convexity_sense(const Block& block, int index, const NodeBounds& node) {
  if (block.convexity == Convexity::Equality) return Sense::Eq;
  const Design zero(static_cast<std::size_t>(block.num_y()), 0);
  return design_allowed(block, index, zero, node) ? Sense::Le : Sense::Eq;
}

RmpLp build_rmp_lp(const StructuredModel& model, const NodeBounds& node, const ColumnPool& pool) {
  RmpLp out;
  LinearProgram& lp = out.lp;
  out.num_x = model.num_x();
  for (int j = 0; j < model.num_x(); ++j) {
    const double lo = node.x_lo.empty() ? 0.0 : node.x_lo[j];
    const double hi = node.x_hi.empty() ? model.x[j].hi : node.x_hi[j];
    lp.add_column(model.c[j], lo, hi);
  }
  for (int r = 0; r < model.num_rows; ++r) lp.add_row(Sense::Ge, model.b[r]);
  for (const auto& e : model.a) lp.set(e.row, e.col, e.value);

  if (model.nonanticipativity) {
    const int p = model.blocks.empty() ? 0 : model.blocks[0].num_y();
    for (int i = 1; i < model.num_blocks(); ++i) {
      for (int j = 0; j < p; ++j) out.aggregate_rows.push_back({{{0, j, 1.0}, {i, j, -1.0}}, Sense::Eq, 0.0});
    }
  }
  for (const auto& b : node.y) {
    out.aggregate_rows.push_back({{{b.block, b.component, 1.0}}, b.sense, static_cast<double>(b.value)});
  }
  out.agg_row0 = lp.num_rows();
  for (const auto& row : out.aggregate_rows) lp.add_row(row.sense, row.rhs);
  out.conv_row0 = lp.num_rows();
  for (int i = 0; i < model.num_blocks(); ++i) {
    out.conv_sense.push_back(convexity_sense(model.blocks[i], i, node));
    lp.add_row(out.conv_sense.back(), 1.0);
  }

  std::vector<double> dy;
  for (int k = 0; k < pool.size(); ++k) {
    const Column& c = pool[k];
    const Block& blk = model.blocks[c.block];
    if (!design_allowed(blk, c.block, c.design, node)) continue;
    const int col = lp.add_column(c.cost);
    out.lambda_pool.push_back(k);
    dy.assign(static_cast<std::size_t>(model.num_rows), 0.0);
    for (const auto& e : blk.linking) dy[e.row] += e.value * static_cast<double>(c.design[e.col]);
    for (int r = 0; r < model.num_rows; ++r) {
      if (dy[r] != 0.0) lp.set(r, col, dy[r]);
    }
    for (std::size_t a = 0; a < out.aggregate_rows.size(); ++a) {
      double v = 0.0;
      for (const auto& t : out.aggregate_rows[a].terms) {
        if (t.block == c.block) v += t.coef * static_cast<double>(c.design[t.component]);
      }
      if (v != 0.0) lp.set(out.agg_row0 + static_cast<int>(a), col, v);
    }
    lp.set(out.conv_row0 + c.block, col, 1.0);
  }
  return out;
}

DualPrices extract_duals(const RmpLp& rmp, const LpSolution& sol) {
  DualPrices d;
  const auto& y = sol.dual;
  d.pi.assign(y.begin(), y.begin() + rmp.agg_row0);
  d.agg.assign(y.begin() + rmp.agg_row0, y.begin() + rmp.conv_row0);
  d.mu.assign(y.begin() + rmp.conv_row0, y.end());
  return d;
}

BlockPrices block_prices(const StructuredModel& model, const RmpLp& rmp, const DualPrices& duals, int block,
                         double cost_weight) {
  BlockPrices p{linking_prices(model.blocks[block], duals.pi), duals.mu[block], cost_weight};
  for (std::size_t a = 0; a < rmp.aggregate_rows.size(); ++a) {
    for (const auto& t : rmp.aggregate_rows[a].terms) {
      if (t.block == block) p.y_price[t.component] += t.coef * duals.agg[a];
    }
  }
  return p;
}

Column column_from_pricing(int block, const PricingResult& result, const BlockPrices& prices) {
  if (!result.has_point() || !(result.upper < 0.0)) {
    throw std::invalid_argument("column_from_pricing: pricing result is not column-worthy (u >= 0)");
  }
  double cost = result.upper + prices.mu;
  for (std::size_t j = 0; j < result.design.size(); ++j) {
    cost += prices.y_price[j] * static_cast<double>(result.design[j]);
  }
  return {block, result.design, cost, Provenance::Priced};
}

double lower_bound_contribution(Sense conv_sense, double l, double mu) {
  return conv_sense == Sense::Le ? std::min(l, -mu) : l;
}

void add_infeasibility_cut(Block& block, const Design& design, CutStyle style) {
  const int p = block.num_y();
  if (static_cast<int>(design.size()) != p) throw std::invalid_argument("add_infeasibility_cut: design size");
  if (style == CutStyle::MonotoneStage) {
    if (!block.monotone) {
      throw std::invalid_argument("add_infeasibility_cut: monotone-stage cut on block " + std::to_string(block.id) +
                                  " without monotone feasibility");
    }
    // y_j + (ybar_j + 1 - ylo_j) z_j >= ybar_j + 1 for each j, sum_j z_j <= p - 1.
    const int z0 = block.num_vars();
    std::vector<Expr> zs;
    for (int j = 0; j < p; ++j) {
      block.z.push_back({0.0, 1.0, VarKind::Integer, std::nullopt});
      const double target = static_cast<double>(design[j]) + 1.0;
      const double coef = target - static_cast<double>(block.y_lo[j]);
      const Expr z = Expr::variable(z0 + j);
      block.constraints.push_back(Expr::constant(target) - Expr::variable(j) - coef * z);
      zs.push_back(z);
    }
    block.constraints.push_back(sum(std::move(zs)) - static_cast<double>(p - 1));
    return;
  }
  bool binary = true;
  for (int j = 0; j < p; ++j) {
    binary = binary && block.y_lo[j] >= 0 && block.y_hi[j] <= 1;
  }
  std::vector<Expr> terms;
  for (int j = 0; j < p; ++j) {
    const Expr y = Expr::variable(j);
    if (binary) {
      terms.push_back(design[j] == 1 ? 1.0 - y : y);
    } else {
      terms.push_back(sqr(y - static_cast<double>(design[j])));
    }
  }
  block.constraints.push_back(1.0 - sum(std::move(terms)));
}

SharedPricing price_shared_column(const Design& design, std::vector<Block>& blocks, ColumnPool& pool,
                                  const PricingOptions& pricing) {
  SharedPricing out;
  const int n = static_cast<int>(blocks.size());
  out.cost.assign(n, std::nullopt);
  out.newly_infeasible.assign(n, false);
  for (int b = 0; b < n; ++b) {
    if (pool.is_infeasible(b, design)) continue;
    if (auto k = pool.find(b, design)) {
      out.cost[b] = pool[*k].cost;
      continue;
    }
    const PricingResult r = solve_fixed_design(blocks[b], design, pricing);
    if (r.has_point()) {
      out.cost[b] = r.upper;
      if (pool.add({b, design, r.upper, Provenance::SharedRepriced}).changed) ++out.columns_added;
    } else if (r.status == PricingStatus::Infeasible) {
      const CutStyle style = blocks[b].monotone ? CutStyle::MonotoneStage : CutStyle::NoGood;
      if (pool.mark_infeasible(b, design, style)) {
        add_infeasibility_cut(blocks[b], design, style);
        out.newly_infeasible[b] = true;
      }
    }
  }
  return out;
}

InitResult init_columns(const ValidatedModel& vm, InitStrategy strategy, const PricingOptions& pricing) {
  const StructuredModel& m = vm.model();
  InitResult out;
  if (strategy == InitStrategy::SingletonDesigns) {
    for (const auto& ic : m.initial_columns) out.pool.add({ic.block, ic.design, ic.cost, Provenance::Initial});
  } else {
    PricingOptions exact = pricing;
    exact.mode = PricingMode::Exact;
    for (int i = 0; i < m.num_blocks(); ++i) {
      const Block& blk = m.blocks[i];
      const BlockPrices zero{std::vector<double>(static_cast<std::size_t>(blk.num_y()), 0.0), 0.0, 1.0};
      const PricingResult r = solve_pricing(blk, zero, exact);
      if (!r.has_point()) continue;
      out.pool.add({i, r.design, r.upper, Provenance::Priced});
      if (!m.nonanticipativity) continue;
      for (int b = 0; b < m.num_blocks(); ++b) {
        if (b == i || out.pool.find(b, r.design)) continue;
        const PricingResult f = solve_fixed_design(m.blocks[b], r.design, exact);
        if (f.has_point()) out.pool.add({b, r.design, f.upper, Provenance::SharedRepriced});
      }
    }
  }
  const RmpLp rmp = build_rmp_lp(m, NodeBounds{}, out.pool);
  const LpSolution s = solve_lp(rmp.lp);
  out.master_feasible = s.status == LpStatus::Optimal;
  if (!out.master_feasible) {
    out.error = std::string("initial restricted master is ") + status_name(s.status) + " with " +
                std::to_string(out.pool.size()) + " columns; supply feasible initial columns";
  }
  return out;
}

namespace {

template <class Fn>
void run_parallel(int n, int workers, Fn fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
}

LinearProgram phase1_lp(const LinearProgram& lp) {
  LinearProgram p = lp;
  std::fill(p.objective.begin(), p.objective.end(), 0.0);
  p.objective_offset = 0.0;
  for (int r = 0; r < lp.num_rows(); ++r) {
    if (lp.senses[r] != Sense::Le) p.set(r, p.add_column(1.0), 1.0);
    if (lp.senses[r] != Sense::Ge) p.set(r, p.add_column(1.0), -1.0);
  }
  return p;
}

class ColumnGeneration {
 public:
  ColumnGeneration(MasterState& st, const NodeBounds& node, const ColgenOptions& o, const EarlyPrune& prune)
      : st_(st), m_(st.model.model()), node_(node), o_(o), prune_(prune), t0_(std::chrono::steady_clock::now()) {
    for (int i = 0; i < m_.num_blocks(); ++i) boxes_.push_back(node_y_box(m_.blocks[i], i, node));
  }

  RelaxedMpResult run() {
    int stall = 0;
    bool force_exact = !o_.budget_first;
    double last_v = kInf;
    int last_added = 0;
    for (long iter = 1; iter <= o_.max_iterations; ++iter) {
      if (o_.deadline && std::chrono::steady_clock::now() >= *o_.deadline) return finish(ColgenStatus::Limit);
      res_.rmp = build_rmp_lp(m_, node_, st_.pool);
      res_.lp = solve_lp(res_.rmp.lp);
      res_.iterations = static_cast<int>(iter);
      if (res_.lp.status == LpStatus::Infeasible) {
        const auto s = phase1_round(static_cast<int>(iter));
        if (s) return finish(*s);
        continue;
      }
      if (res_.lp.status == LpStatus::Unbounded) throw std::runtime_error("restricted master LP is unbounded");
      if (!res_.lp.optimal()) return finish(ColgenStatus::Limit);

      const double v = res_.lp.objective;
      res_.v = v;
      res_.ub = std::min(res_.ub, v);
      if (last_added > 0 && std::abs(v - last_v) <= 1e-12 * (1.0 + std::abs(v))) {
        if (++stall >= o_.stall_limit) force_exact = true;
      } else {
        stall = 0;
      }
      last_v = v;

      const DualPrices duals = extract_duals(res_.rmp, res_.lp);
      std::vector<BlockPrices> prices;
      for (int i = 0; i < m_.num_blocks(); ++i) prices.push_back(block_prices(m_, res_.rmp, duals, i));
      PricingMode mode = force_exact ? PricingMode::Exact : PricingMode::Budget;
      auto results = price(prices, mode);
      if (mode == PricingMode::Budget && !any_worthy(results)) {
        mode = PricingMode::Exact;
        results = price(prices, mode);
      }
      double sum_l = 0.0;
      for (int i = 0; i < m_.num_blocks(); ++i) {
        sum_l += lower_bound_contribution(res_.rmp.conv_sense[i], results[i].lower, duals.mu[i]);
      }
      res_.lb = std::max(res_.lb, v + sum_l);
      const int added = add_columns(results, prices, false);
      last_added = added;
      log(static_cast<int>(iter), false, v, sum_l, added, mode);

      if (res_.lb == kInf) return finish(ColgenStatus::Infeasible);
      if (prune_ && prune_(res_.lb)) return finish(ColgenStatus::Pruned);
      if (res_.ub - res_.lb <= o_.eps) return finish(ColgenStatus::Converged);
      if (added == 0) return finish(ColgenStatus::GapOpen);
    }
    return finish(ColgenStatus::Limit);
  }

 private:
  // One feasibility-restoring round. Returns a final status, or nullopt to continue.
  std::optional<ColgenStatus> phase1_round(int iter) {
    const LinearProgram p1 = phase1_lp(res_.rmp.lp);
    const LpSolution s1 = solve_lp(p1);
    if (!s1.optimal()) return ColgenStatus::Limit;
    const DualPrices duals = extract_duals(res_.rmp, s1);
    std::vector<BlockPrices> prices;
    for (int i = 0; i < m_.num_blocks(); ++i) prices.push_back(block_prices(m_, res_.rmp, duals, i, 0.0));
    PricingMode mode = o_.budget_first ? PricingMode::Budget : PricingMode::Exact;
    auto results = price(prices, mode);
    if (mode == PricingMode::Budget && !any_worthy(results)) {
      mode = PricingMode::Exact;
      results = price(prices, mode);
    }
    double sum_l = 0.0;
    for (int i = 0; i < m_.num_blocks(); ++i) {
      sum_l += lower_bound_contribution(res_.rmp.conv_sense[i], results[i].lower, duals.mu[i]);
    }
    const int added = add_columns(results, prices, true);
    log(iter, true, s1.objective, sum_l, added, mode);
    // A positive lower bound on the phase-1 optimum over all columns proves the node empty.
    if (s1.objective + sum_l > 1e-9) return ColgenStatus::Infeasible;
    if (s1.objective <= 1e-9) return ColgenStatus::Limit;  // phases disagree numerically
    if (added == 0) return ColgenStatus::GapOpen;
    return std::nullopt;
  }

  bool any_worthy(const std::vector<PricingResult>& rs) const {
    return std::any_of(rs.begin(), rs.end(),
                       [&](const PricingResult& r) { return r.has_point() && r.upper < -o_.column_tol; });
  }

  std::vector<PricingResult> price(const std::vector<BlockPrices>& prices, PricingMode mode) {
    const int n = m_.num_blocks();
    std::vector<PricingResult> out(static_cast<std::size_t>(n));
    PricingOptions po = o_.pricing;
    po.mode = mode;
    run_parallel(n, o_.workers, [&](int i) {
      if (!boxes_[i]) {
        out[i].status = PricingStatus::Infeasible;
        out[i].lower = kInf;
        return;
      }
      out[i] = solve_pricing(st_.blocks[i], prices[i], po, boxes_[i]);
    });
    res_.pricing_calls += n;
    return out;
  }

  int add_columns(const std::vector<PricingResult>& results, const std::vector<BlockPrices>& prices, bool phase1) {
    int added = 0;
    PricingOptions exact = o_.pricing;
    exact.mode = PricingMode::Exact;
    for (int i = 0; i < m_.num_blocks(); ++i) {
      const PricingResult& r = results[i];
      if (!r.has_point() || !(r.upper < -o_.column_tol)) continue;
      if (st_.pool.is_infeasible(i, r.design)) continue;
      Column col;
      if (phase1) {
        const PricingResult f = solve_fixed_design(st_.blocks[i], r.design, exact);
        if (!f.has_point()) continue;
        col = {i, r.design, f.upper, Provenance::Priced};
      } else {
        col = column_from_pricing(i, r, prices[i]);
      }
      if (st_.pool.add(col).changed) ++added;
      if (m_.nonanticipativity) {
        added += price_shared_column(r.design, st_.blocks, st_.pool, exact).columns_added;
      }
    }
    res_.columns_added += added;
    return added;
  }

  void log(int iter, bool phase1, double v, double sum_l, int added, PricingMode mode) {
    ColgenTraceRow row;
    row.iter = iter;
    row.phase1 = phase1;
    row.v_rmp = v;
    row.sum_l = sum_l;
    row.lb = res_.lb;
    row.ub = res_.ub;
    row.columns_added = added;
    row.mode = mode;
    row.wallclock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
    res_.trace.push_back(row);
  }

  RelaxedMpResult finish(ColgenStatus s) {
    res_.status = s;
    return std::move(res_);
  }

  MasterState& st_;
  const StructuredModel& m_;
  const NodeBounds& node_;
  const ColgenOptions& o_;
  const EarlyPrune& prune_;
  std::chrono::steady_clock::time_point t0_;
  std::vector<std::optional<YBounds>> boxes_;
  RelaxedMpResult res_;
};

}  // namespace

RelaxedMpResult solve_relaxed_mp(MasterState& state, const NodeBounds& node, const ColgenOptions& options,
                                 const EarlyPrune& early_prune) {
  return ColumnGeneration(state, node, options, early_prune).run();
}

}  // namespace bnp
