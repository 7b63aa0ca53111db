#include "bnp/bnp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace bnp {

const char* rule_name(BranchRule r) {
  return r == BranchRule::MostFractional ? "most-fractional" : "largest-entity-first";
}

const char* status_name(NodeStatus s) {
  switch (s) {
    case NodeStatus::Open: return "open";
    case NodeStatus::Pruned: return "pruned";
    case NodeStatus::Branched: return "branched";
    case NodeStatus::Integral: return "integral";
    case NodeStatus::Infeasible: return "infeasible";
    case NodeStatus::Unresolved: return "unresolved";
  }
  return "?";
}

const char* status_name(BnpStatus s) {
  switch (s) {
    case BnpStatus::Optimal: return "optimal";
    case BnpStatus::Limit: return "limit";
    case BnpStatus::Infeasible: return "infeasible";
  }
  return "?";
}

double BnpResult::gap() const {
  if (ub == kInf || lb == -kInf) return kInf;
  if (ub - lb <= 0.0) return 0.0;
  return (ub - lb) / std::max(std::abs(ub), 1e-10);
}

AggregateReport aggregate_originals(const StructuredModel& model, const RmpLp& rmp, const std::vector<double>& primal,
                                    const ColumnPool& pool, double tol) {
  const int n = model.num_blocks();
  AggregateReport out;
  out.chosen.assign(static_cast<std::size_t>(n), std::nullopt);
  out.mixed.assign(static_cast<std::size_t>(n), false);
  std::vector<std::map<Design, std::pair<double, int>>> used(static_cast<std::size_t>(n));
  std::vector<double> total(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < rmp.lambda_pool.size(); ++k) {
    const double v = primal[rmp.num_x + k];
    const Column& c = pool[rmp.lambda_pool[k]];
    total[c.block] += v;
    if (v <= tol) continue;
    auto& slot = used[c.block][c.design];
    slot.first += v;
    slot.second = rmp.lambda_pool[k];
  }
  for (int i = 0; i < n; ++i) {
    const Block& b = model.blocks[i];
    std::vector<double> yh(static_cast<std::size_t>(b.num_y()), 0.0);
    for (const auto& [d, wv] : used[i]) {
      for (int j = 0; j < b.num_y(); ++j) yh[j] += wv.first * static_cast<double>(d[j]);
    }
    const double empty_share = rmp.conv_sense[i] == Sense::Le ? 1.0 - total[i] : 0.0;
    const Design zero(static_cast<std::size_t>(b.num_y()), 0);
    std::size_t distinct = used[i].size();
    if (empty_share > tol && !used[i].count(zero)) ++distinct;
    out.mixed[i] = distinct > 1;
    if (distinct == 1 && empty_share <= tol) out.chosen[i] = used[i].begin()->second.second;
    if (distinct == 1 && empty_share > tol && used[i].count(zero)) out.chosen[i] = used[i].begin()->second.second;
    for (int j = 0; j < b.num_y(); ++j) {
      const double f = std::abs(yh[j] - std::round(yh[j]));
      if (f > tol && f > out.max_fractionality) {
        out.max_fractionality = f;
        out.block = i;
        out.component = j;
      }
    }
    out.y_hat.push_back(std::move(yh));
  }
  out.lambda_fractional = std::any_of(out.mixed.begin(), out.mixed.end(), [](bool m) { return m; });
  return out;
}

BranchDecision choose_branch(const AggregateReport& report, const StructuredModel& model, const RmpLp& rmp,
                             const std::vector<double>& primal, const ColumnPool& pool, BranchRule rule,
                             double tol) {
  if (report.max_fractionality > tol) {
    int bi = report.block, bj = report.component;
    if (rule == BranchRule::LargestEntityFirst) {
      double best_w = -kInf, best_f = 0.0;
      bool any_weights = false;
      for (std::size_t i = 0; i < report.y_hat.size(); ++i) {
        const Block& b = model.blocks[i];
        if (b.entity_weights.empty()) continue;
        any_weights = true;
        for (std::size_t j = 0; j < report.y_hat[i].size(); ++j) {
          const double f = std::abs(report.y_hat[i][j] - std::round(report.y_hat[i][j]));
          if (f <= tol) continue;
          const double w = b.entity_weights[j];
          if (w > best_w || (w == best_w && f > best_f)) {
            best_w = w;
            best_f = f;
            bi = static_cast<int>(i);
            bj = static_cast<int>(j);
          }
        }
      }
      if (!any_weights || best_w == -kInf) {
        bi = report.block;
        bj = report.component;
      }
    }
    return {bi, bj, static_cast<std::int64_t>(std::floor(report.y_hat[bi][bj])), false};
  }
  if (!report.lambda_fractional) throw std::logic_error("choose_branch: y_hat and lambda are integral");

  // Last resort: the mixed block holding the most expensive active column.
  // Split on the component where its designs spread most; filtering removes
  // every active design from one child or the other.
  int block = -1;
  double worst = -kInf;
  for (std::size_t k = 0; k < rmp.lambda_pool.size(); ++k) {
    if (primal[rmp.num_x + k] <= tol) continue;
    const Column& c = pool[rmp.lambda_pool[k]];
    if (report.mixed[c.block] && c.cost > worst) {
      worst = c.cost;
      block = c.block;
    }
  }
  if (block < 0) {
    for (std::size_t i = 0; i < report.mixed.size(); ++i) {
      if (report.mixed[i]) {
        block = static_cast<int>(i);
        break;
      }
    }
  }
  const Block& b = model.blocks[block];
  std::vector<std::int64_t> lo(static_cast<std::size_t>(b.num_y()), INT64_MAX), hi(lo.size(), INT64_MIN);
  double total = 0.0;
  for (std::size_t k = 0; k < rmp.lambda_pool.size(); ++k) {
    const double v = primal[rmp.num_x + k];
    const Column& c = pool[rmp.lambda_pool[k]];
    if (c.block != block) continue;
    total += v;
    if (v <= tol) continue;
    for (int j = 0; j < b.num_y(); ++j) {
      lo[j] = std::min(lo[j], c.design[j]);
      hi[j] = std::max(hi[j], c.design[j]);
    }
  }
  if (rmp.conv_sense[block] == Sense::Le && 1.0 - total > tol) {
    for (int j = 0; j < b.num_y(); ++j) {
      lo[j] = std::min<std::int64_t>(lo[j], 0);
      hi[j] = std::max<std::int64_t>(hi[j], 0);
    }
  }
  int bj = 0;
  for (int j = 1; j < b.num_y(); ++j) {
    if (hi[j] - lo[j] > hi[bj] - lo[bj]) bj = j;
  }
  // Any split value in [lo, hi) separates the active designs.
  const auto v = static_cast<std::int64_t>(std::llround(report.y_hat[block][bj]));
  return {block, bj, std::clamp(v, lo[bj], hi[bj] - 1), true};
}

std::vector<int> filter_columns(const StructuredModel& model, const NodeBounds& node, const ColumnPool& pool) {
  std::vector<int> out;
  for (int k = 0; k < pool.size(); ++k) {
    const Column& c = pool[k];
    if (design_allowed(model.blocks[c.block], c.block, c.design, node)) out.push_back(k);
  }
  return out;
}

bool early_prune(double running_lb, double ub, double gap, double abs_gap) {
  if (ub == kInf || running_lb == -kInf) return false;
  if (running_lb == kInf) return true;
  if (gap == kInf) return true;
  return running_lb >= ub - std::max(gap * std::abs(ub), abs_gap);
}

std::optional<Incumbent> recover_original_solution(const StructuredModel& model, const RmpLp& rmp,
                                                   const std::vector<double>& primal, ColumnPool& pool,
                                                   const PricingOptions& pricing) {
  const AggregateReport rep = aggregate_originals(model, rmp, primal, pool);
  if (rep.lambda_fractional || rep.max_fractionality > 0.0) {
    throw std::invalid_argument("recover_original_solution: lambda is not integral");
  }
  PricingOptions exact = pricing;
  exact.mode = PricingMode::Exact;
  Incumbent inc;
  inc.x.assign(primal.begin(), primal.begin() + rmp.num_x);
  double xcost = 0.0;
  for (int j = 0; j < model.num_x(); ++j) {
    if (model.x[j].kind == VarKind::Integer) inc.x[j] = std::round(inc.x[j]);
    inc.x[j] = std::clamp(inc.x[j], 0.0, model.x[j].hi);
    xcost += model.c[j] * inc.x[j];
  }
  inc.master_objective = xcost;
  inc.objective = xcost;
  for (int i = 0; i < model.num_blocks(); ++i) {
    const Block& b = model.blocks[i];
    RecoveredBlock rb;
    double stored = 0.0;
    if (rep.chosen[i]) {
      const Column& c = pool[*rep.chosen[i]];
      rb.y = c.design;
      stored = c.cost;
      inc.lambda.push_back({*rep.chosen[i], 1.0});
    } else {
      rb.empty = true;
      rb.y.assign(static_cast<std::size_t>(b.num_y()), 0);
    }
    const PricingResult f = solve_fixed_design(b, rb.y, exact);
    if (!f.has_point()) {
      if (!rb.empty) return std::nullopt;
      // The empty design carries no block point of its own.
      for (const auto& z : b.z) rb.z.push_back(z.lo);
      rb.cost = 0.0;
    } else {
      rb.z.assign(f.point.begin() + b.num_y(), f.point.end());
      rb.cost = rb.empty ? 0.0 : f.upper;
    }
    if (!rb.empty && rb.cost < stored - 1e-6 * (1.0 + std::abs(stored))) {
      pool.add({i, rb.y, rb.cost, pool[*rep.chosen[i]].provenance});
    }
    inc.master_objective += stored;
    inc.objective += rb.cost;
    inc.blocks.push_back(std::move(rb));
  }
  return inc;
}

double incumbent_violation(const StructuredModel& model, const Incumbent& inc) {
  std::vector<double> lhs(static_cast<std::size_t>(model.num_rows), 0.0);
  for (const auto& e : model.a) lhs[e.row] += e.value * inc.x[e.col];
  double viol = 0.0;
  for (int i = 0; i < model.num_blocks(); ++i) {
    const Block& b = model.blocks[i];
    const RecoveredBlock& rb = inc.blocks[i];
    for (const auto& e : b.linking) lhs[e.row] += e.value * static_cast<double>(rb.y[e.col]);
    std::vector<double> pt(rb.y.begin(), rb.y.end());
    pt.insert(pt.end(), rb.z.begin(), rb.z.end());
    for (const auto& g : b.constraints) {
      try {
        viol = std::max(viol, eval_expr(g, pt));
      } catch (const EvalError&) {
        viol = kInf;
      }
    }
    for (int j = 0; j < b.num_y(); ++j) {
      viol = std::max({viol, static_cast<double>(b.y_lo[j] - rb.y[j]), static_cast<double>(rb.y[j] - b.y_hi[j])});
    }
    for (int j = 0; j < b.num_z(); ++j) viol = std::max({viol, b.z[j].lo - rb.z[j], rb.z[j] - b.z[j].hi});
  }
  for (int r = 0; r < model.num_rows; ++r) viol = std::max(viol, model.b[r] - lhs[r]);
  if (model.nonanticipativity) {
    for (const auto& rb : inc.blocks) {
      for (std::size_t j = 0; j < rb.y.size(); ++j) {
        viol = std::max(viol, std::abs(static_cast<double>(rb.y[j] - inc.blocks[0].y[j])));
      }
    }
  }
  return viol;
}

namespace {

using Clock = std::chrono::steady_clock;

std::optional<int> fractional_x(const StructuredModel& m, const std::vector<double>& primal, double tol) {
  std::optional<int> best;
  double best_f = tol;
  for (int j = 0; j < m.num_x(); ++j) {
    if (m.x[j].kind != VarKind::Integer) continue;
    const double f = std::abs(primal[j] - std::round(primal[j]));
    if (f > best_f) {
      best_f = f;
      best = j;
    }
  }
  return best;
}

class Tree {
 public:
  Tree(const ValidatedModel& vm, const BnpOptions& o) : vm_(vm), m_(vm.model()), o_(o), st_(vm) {}

  BnpResult run() {
    t0_ = Clock::now();
    if (o_.time_limit_s) deadline_ = t0_ + std::chrono::duration_cast<Clock::duration>(
                                               std::chrono::duration<double>(std::max(0.0, *o_.time_limit_s)));
    const InitStrategy strategy =
        o_.init.value_or(m_.initial_columns.empty() ? InitStrategy::ZeroDualPricing : InitStrategy::SingletonDesigns);
    if (!expired()) {
      InitResult init = init_columns(vm_, strategy, o_.colgen.pricing);
      st_.pool = std::move(init.pool);
      if (m_.nonanticipativity) {
        // Init cannot cut the working blocks; reprice every design in every scenario here.
        std::set<Design> designs;
        for (const auto& c : st_.pool.columns()) designs.insert(c.design);
        PricingOptions exact = o_.colgen.pricing;
        exact.mode = PricingMode::Exact;
        for (const auto& d : designs) price_shared_column(d, st_.blocks, st_.pool, exact);
      }
    }
    open_.push_back(BnpNode{});
    next_id_ = 1;
    bool limit = false;
    while (!open_.empty()) {
      if (expired() || res_.nodes >= o_.node_limit) {
        limit = true;
        break;
      }
      if (closed(global_lb(), ub_)) break;
      process(pop_best());
    }
    res_.lb = std::max(res_.lb, std::min(global_lb(), ub_));
    res_.ub = ub_;
    if (!limit && !unresolved_ && open_.empty()) {
      res_.status = ub_ < kInf ? BnpStatus::Optimal : BnpStatus::Infeasible;
    } else if (!limit && closed(res_.lb, ub_)) {
      res_.status = BnpStatus::Optimal;
    } else {
      res_.status = BnpStatus::Limit;
    }
    if (res_.status == BnpStatus::Infeasible) res_.lb = kInf;
    res_.pool_size = st_.pool.size();
    res_.infeasible_columns = st_.pool.infeasible();
    res_.columns = st_.pool.columns();
    for (std::size_t i = 0; i < st_.blocks.size(); ++i) {
      res_.cut_rows.push_back(static_cast<int>(st_.blocks[i].constraints.size() -
                                               st_.model->blocks[i].constraints.size()));
    }
    res_.wallclock_ms = ms();
    return std::move(res_);
  }

 private:
  bool expired() const { return deadline_ && Clock::now() >= *deadline_; }
  double ms() const { return std::chrono::duration<double, std::milli>(Clock::now() - t0_).count(); }
  bool closed(double lb, double ub) const { return early_prune(lb, ub, o_.gap, o_.abs_gap); }

  double global_lb() const {
    double lb = unresolved_lb_;
    for (const auto& n : open_) lb = std::min(lb, n.lb);
    return lb;
  }

  // Best bound; ties prefer deeper nodes, then older ones.
  BnpNode pop_best() {
    auto it = std::min_element(open_.begin(), open_.end(), [](const BnpNode& a, const BnpNode& b) {
      if (a.lb != b.lb) return a.lb < b.lb;
      if (a.depth != b.depth) return a.depth > b.depth;
      return a.id < b.id;
    });
    BnpNode n = std::move(*it);
    open_.erase(it);
    return n;
  }

  void log(const BnpNode& n) {
    res_.tree.push_back({n.id, n.parent, n.depth, n.lb, ub_, st_.pool.size(), n.status, ms()});
    // LB so far: open nodes and unresolved ones. The node just logged is no longer open.
    const double lb = std::min(global_lb(), ub_);
    if (lb > res_.lb) res_.lb = lb;
  }

  void offer(const RmpLp& rmp, const std::vector<double>& primal) {
    const auto inc = recover_original_solution(m_, rmp, primal, st_.pool, o_.colgen.pricing);
    if (!inc || !(inc->objective < ub_)) return;
    if (incumbent_violation(m_, *inc) > 1e-6) return;
    ub_ = inc->objective;
    res_.incumbent = *inc;
  }

  void heuristic(const RmpLp& rmp) {
    std::vector<bool> mask(static_cast<std::size_t>(rmp.lp.num_cols()), true);
    for (int j = 0; j < m_.num_x(); ++j) mask[j] = m_.x[j].kind == VarKind::Integer;
    MilpOptions mo;
    mo.node_limit = o_.heuristic_node_limit;
    const LpSolution s = solve_milp(rmp.lp, mask, mo);
    if (s.has_point) offer(rmp, s.primal);
  }

  void process(BnpNode n) {
    ++res_.nodes;
    res_.max_depth = std::max(res_.max_depth, n.depth);
    if (closed(n.lb, ub_)) {
      n.status = NodeStatus::Pruned;
      log(n);
      return;
    }
    ColgenOptions co = o_.colgen;
    if (deadline_) co.deadline = co.deadline ? std::min(*co.deadline, *deadline_) : *deadline_;
    const EarlyPrune prune = [this](double lb) { return closed(lb, ub_); };
    RelaxedMpResult r = solve_relaxed_mp(st_, n.bounds, co, prune);
    res_.colgen_iterations += r.iterations;
    res_.columns_generated += r.columns_added;
    res_.pricing_calls += r.pricing_calls;
    res_.colgen_trace.insert(res_.colgen_trace.end(), r.trace.begin(), r.trace.end());
    if (r.lb > n.lb) n.lb = r.lb;
    if (n.id == 0) {
      res_.root_lb = n.lb;
      res_.root_v = r.v;
    }
    switch (r.status) {
      case ColgenStatus::Infeasible:
        n.status = NodeStatus::Infeasible;
        n.lb = kInf;
        log(n);
        return;
      case ColgenStatus::Pruned:
        n.status = NodeStatus::Pruned;
        log(n);
        return;
      case ColgenStatus::Limit:
        if (!r.lp.optimal()) {
          unresolve(n);
          return;
        }
        break;
      case ColgenStatus::Converged:
      case ColgenStatus::GapOpen:
        break;
    }
    if (closed(n.lb, ub_)) {
      n.status = NodeStatus::Pruned;
      log(n);
      return;
    }
    const std::vector<double>& primal = r.lp.primal;
    const AggregateReport rep = aggregate_originals(m_, r.rmp, primal, st_.pool);
    const auto xj = fractional_x(m_, primal, 1e-6);
    const bool integral = rep.max_fractionality == 0.0 && !rep.lambda_fractional && !xj;
    if (integral) {
      offer(r.rmp, primal);
      if (r.status == ColgenStatus::Converged || closed(n.lb, ub_)) {
        n.status = NodeStatus::Integral;
        log(n);
      } else {
        unresolve(n);
      }
      return;
    }
    if (n.id == 0) res_.root_fractional = true;
    if (o_.rmp_milp_heuristic) heuristic(r.rmp);
    if (closed(n.lb, ub_)) {
      n.status = NodeStatus::Pruned;
      log(n);
      return;
    }
    if (r.status == ColgenStatus::Limit) {
      unresolve(n);
      return;
    }
    branch(n, rep, r, xj);
  }

  void unresolve(BnpNode& n) {
    n.status = NodeStatus::Unresolved;
    unresolved_ = true;
    unresolved_lb_ = std::min(unresolved_lb_, n.lb);
    log(n);
  }

  void branch(BnpNode& n, const AggregateReport& rep, const RelaxedMpResult& r, const std::optional<int>& xj) {
    BnpNode down{next_id_++, n.id, n.depth + 1, n.bounds, n.lb, NodeStatus::Open};
    BnpNode up{next_id_++, n.id, n.depth + 1, n.bounds, n.lb, NodeStatus::Open};
    if (rep.max_fractionality > 0.0 || rep.lambda_fractional) {
      const BranchDecision d = choose_branch(rep, m_, r.rmp, r.lp.primal, st_.pool, o_.rule);
      if (d.lambda_fallback) ++res_.lambda_branches;
      std::vector<int> targets{d.block};
      if (m_.nonanticipativity) {
        targets.clear();
        for (int i = 0; i < m_.num_blocks(); ++i) targets.push_back(i);
      }
      for (int i : targets) {
        down.bounds.y.push_back({i, d.component, Sense::Le, d.floor_value});
        up.bounds.y.push_back({i, d.component, Sense::Ge, d.floor_value + 1});
      }
    } else {
      const int j = *xj;
      for (BnpNode* c : {&down, &up}) {
        if (c->bounds.x_lo.empty()) {
          c->bounds.x_lo.assign(static_cast<std::size_t>(m_.num_x()), 0.0);
          for (const auto& x : m_.x) c->bounds.x_hi.push_back(x.hi);
        }
      }
      const double f = std::floor(r.lp.primal[j]);
      down.bounds.x_hi[j] = f;
      up.bounds.x_lo[j] = f + 1.0;
    }
    n.status = NodeStatus::Branched;
    open_.push_back(std::move(down));
    open_.push_back(std::move(up));
    log(n);
  }

  const ValidatedModel& vm_;
  const StructuredModel& m_;
  const BnpOptions& o_;
  MasterState st_;
  std::vector<BnpNode> open_;
  int next_id_ = 0;
  double ub_ = kInf;
  double unresolved_lb_ = kInf;
  bool unresolved_ = false;
  Clock::time_point t0_;
  std::optional<Clock::time_point> deadline_;
  BnpResult res_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

BnpResult solve_bnp(const ValidatedModel& model, const BnpOptions& options) {
  if (!(options.gap >= 0.0)) throw std::invalid_argument("solve_bnp: gap must be nonnegative");
  return Tree(model, options).run();
}

std::string tree_log_csv(const std::vector<TreeLogRow>& rows) {
  std::string out = "node,parent,depth,lb,ub_after,columns_in_pool,status,wallclock_ms\n";
  for (const auto& r : rows) {
    out += std::to_string(r.node) + ',' + std::to_string(r.parent) + ',' + std::to_string(r.depth) + ',' +
           fmt(r.lb) + ',' + fmt(r.ub_after) + ',' + std::to_string(r.columns_in_pool) + ',' + status_name(r.status) +
           ',' + fmt(r.wallclock_ms) + '\n';
  }
  return out;
}

std::string colgen_log_csv(const std::vector<ColgenTraceRow>& rows) {
  std::string out = "iter,phase1,v_rmp,sum_l,lb,ub,columns_added,mode,wallclock_ms\n";
  for (const auto& r : rows) {
    out += std::to_string(r.iter) + ',' + (r.phase1 ? "1" : "0") + ',' + fmt(r.v_rmp) + ',' + fmt(r.sum_l) + ',' +
           fmt(r.lb) + ',' + fmt(r.ub) + ',' + std::to_string(r.columns_added) + ',' +
           (r.mode == PricingMode::Exact ? "exact" : "budget") + ',' + fmt(r.wallclock_ms) + '\n';
  }
  return out;
}

}  // namespace bnp
