#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "bnp/lp.hpp"

namespace bnp {

namespace {

struct MilpNode {
  std::vector<double> lower;
  std::vector<double> upper;
  double bound = -kInf;
  long id = 0;
};

struct WorseNode {
  bool operator()(const MilpNode& a, const MilpNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace

LpSolution solve_milp(const LinearProgram& lp, const std::vector<bool>& integer_mask, const MilpOptions& options) {
  lp.validate();
  if (static_cast<int>(integer_mask.size()) != lp.num_cols()) {
    throw std::invalid_argument("solve_milp: integer mask size mismatch");
  }
  const bool any_integer = std::any_of(integer_mask.begin(), integer_mask.end(), [](bool b) { return b; });
  if (!any_integer) return solve_lp(lp, options.lp);

  LinearProgram work = lp;
  for (int j = 0; j < lp.num_cols(); ++j) {
    if (!integer_mask[j]) continue;
    work.lower[j] = std::ceil(work.lower[j] - options.integrality_tol);
    work.upper[j] = std::floor(work.upper[j] + options.integrality_tol);
    if (work.lower[j] > work.upper[j]) {
      LpSolution s;
      s.status = LpStatus::Infeasible;
      return s;
    }
  }

  LpSolution best;
  best.status = LpStatus::Infeasible;
  best.objective = kInf;
  long next_id = 0;
  long nodes = 0;
  long iterations = 0;
  std::priority_queue<MilpNode, std::vector<MilpNode>, WorseNode> open;
  open.push({work.lower, work.upper, -kInf, next_id++});

  auto prunable = [&](double bound) {
    if (!best.has_point) return false;
    const double tol = std::max(options.abs_gap, options.rel_gap * std::abs(best.objective));
    return bound >= best.objective - tol;
  };

  bool hit_limit = false;
  while (!open.empty()) {
    if (prunable(open.top().bound)) break;
    if (nodes >= options.node_limit) {
      hit_limit = true;
      break;
    }
    MilpNode node = open.top();
    open.pop();
    ++nodes;
    work.lower = node.lower;
    work.upper = node.upper;
    LpSolution rel = solve_lp(work, options.lp);
    iterations += rel.iterations;
    if (rel.status == LpStatus::Unbounded) {
      if (nodes == 1) {
        rel.nodes = nodes;
        return rel;
      }
      continue;
    }
    if (rel.status != LpStatus::Optimal) continue;
    if (prunable(rel.objective)) continue;

    int branch = -1;
    double worst = options.integrality_tol;
    for (int j = 0; j < lp.num_cols(); ++j) {
      if (!integer_mask[j]) continue;
      const double v = rel.primal[j];
      const double frac = std::abs(v - std::round(v));
      if (frac > worst) {
        worst = frac;
        branch = j;
      }
    }
    if (branch < 0) {
      for (int j = 0; j < lp.num_cols(); ++j) {
        if (integer_mask[j]) rel.primal[j] = std::round(rel.primal[j]);
      }
      double obj = lp.objective_offset;
      for (int j = 0; j < lp.num_cols(); ++j) obj += lp.objective[j] * rel.primal[j];
      rel.objective = obj;
      if (!best.has_point || obj < best.objective) best = rel;
      continue;
    }
    const double v = rel.primal[branch];
    MilpNode down{node.lower, node.upper, rel.objective, next_id++};
    down.upper[branch] = std::floor(v);
    MilpNode up{node.lower, node.upper, rel.objective, next_id++};
    up.lower[branch] = std::ceil(v);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  double open_bound = kInf;
  // Remaining open nodes carry parent bounds, which stay valid lower bounds.
  while (!open.empty()) {
    open_bound = std::min(open_bound, open.top().bound);
    open.pop();
  }
  if (best.has_point) {
    best.status = hit_limit ? LpStatus::Limit : LpStatus::Optimal;
    best.bound = std::min(best.objective, open_bound);
  } else {
    best.status = hit_limit ? LpStatus::Limit : LpStatus::Infeasible;
    best.bound = open_bound;
  }
  best.nodes = nodes;
  best.iterations = iterations;
  return best;
}

}  // namespace bnp
