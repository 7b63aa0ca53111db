#include "bnp/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "bnp/colgen.hpp"
#include "bnp/lp.hpp"
#include "bnp/pricing.hpp"

namespace bnp {

const char* status_name(OracleStatus s) {
  switch (s) {
    case OracleStatus::Optimal: return "optimal";
    case OracleStatus::Limit: return "limit";
    case OracleStatus::Infeasible: return "infeasible";
    case OracleStatus::Refused: return "refused";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::optional<Clock::time_point> deadline_after(std::optional<double> seconds, Clock::time_point t0) {
  if (!seconds) return std::nullopt;
  return t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(std::max(0.0, *seconds)));
}

}  // namespace

GlobalProblem fullspace_problem(const MonolithicMinlp& flat) {
  GlobalProblem p;
  for (const auto& v : flat.vars) {
    if (!std::isfinite(v.lo) || !std::isfinite(v.hi)) {
      throw std::invalid_argument("variable '" + v.name + "' is unbounded");
    }
    p.bounds.push_back(Interval{v.lo, v.hi});
    p.integer.push_back(v.integer);
  }
  p.objective = flat.objective;
  p.constraints = flat.constraints;
  for (const auto& row : flat.linear_rows) {
    std::vector<Expr> terms;
    for (const auto& [j, a] : row.terms) terms.push_back(a * Expr::variable(j));
    const Expr lhs = terms.empty() ? Expr::constant(0.0) : sum(std::move(terms));
    if (row.sense != Sense::Le) p.constraints.push_back(row.rhs - lhs);
    if (row.sense != Sense::Ge) p.constraints.push_back(lhs - row.rhs);
  }
  return p;
}

OracleResult solve_fullspace(const ValidatedModel& model, GlobalOptions options, std::optional<double> time_limit_s) {
  const auto t0 = Clock::now();
  OracleResult out;
  GlobalProblem p;
  try {
    p = fullspace_problem(flatten_fullspace(model));
  } catch (const std::invalid_argument& e) {
    out.reason = e.what();
    return out;
  }
  options.deadline = deadline_after(time_limit_s, t0);
  const GlobalResult g = solve_global(p, options);
  out.nodes = g.nodes;
  out.objective = g.upper;
  out.lower = g.lower;
  out.point = g.point;
  switch (g.status) {
    case GlobalStatus::Optimal: out.status = OracleStatus::Optimal; break;
    case GlobalStatus::BoundsOnly: out.status = OracleStatus::Limit; break;
    case GlobalStatus::Infeasible: out.status = OracleStatus::Infeasible; break;
  }
  out.wallclock_ms = ms_since(t0);
  return out;
}

OracleResult enumerate_columns(const ValidatedModel& vm, const EnumerateOptions& options) {
  const auto t0 = Clock::now();
  const auto deadline = deadline_after(options.time_limit_s, t0);
  const StructuredModel& m = vm.model();
  OracleResult out;
  std::int64_t total = 0;
  for (const auto& b : m.blocks) {
    const std::int64_t n = b.lattice_size();
    total = n > options.max_designs - total ? options.max_designs + 1 : total + n;
  }
  if (total > options.max_designs) {
    out.reason = "design lattices exceed " + std::to_string(options.max_designs) + " points";
    return out;
  }
  for (const auto& b : m.blocks) {
    for (const auto& z : b.z) {
      if (z.kind == VarKind::Continuous && !z.closed_form) {
        out.reason = "block " + std::to_string(b.id) + " has continuous z without a closed form";
        return out;
      }
    }
  }

  ColumnPool pool;
  for (int i = 0; i < m.num_blocks(); ++i) {
    const Block& b = m.blocks[i];
    const BlockPrices zero{std::vector<double>(static_cast<std::size_t>(b.num_y()), 0.0), 0.0, 1.0};
    Design y = b.y_lo;
    while (true) {
      if (deadline && Clock::now() >= *deadline) {
        out.status = OracleStatus::Limit;
        out.reason = "time limit while enumerating designs";
        out.wallclock_ms = ms_since(t0);
        return out;
      }
      const LatticeResult r = enumerate_lattice(b, zero, YBounds{y, y});
      if (r.feasible) pool.add({i, y, r.value, Provenance::Initial});
      int k = b.num_y() - 1;
      while (k >= 0 && y[k] == b.y_hi[k]) {
        y[k] = b.y_lo[k];
        --k;
      }
      if (k < 0) break;
      ++y[k];
    }
  }
  out.columns = pool.size();

  const RmpLp rmp = build_rmp_lp(m, NodeBounds{}, pool);
  std::vector<bool> mask(static_cast<std::size_t>(rmp.lp.num_cols()), true);
  for (int j = 0; j < m.num_x(); ++j) mask[j] = m.x[j].kind == VarKind::Integer;
  MilpOptions mo;
  mo.node_limit = 2'000'000;
  const LpSolution s = solve_milp(rmp.lp, mask, mo);
  out.nodes = s.nodes;
  out.lower = s.bound;
  if (s.status == LpStatus::Infeasible) {
    out.status = OracleStatus::Infeasible;
    out.lower = kInf;
  } else if (s.status == LpStatus::Unbounded) {
    out.status = OracleStatus::Refused;
    out.reason = "master MILP is unbounded";
  } else {
    out.status = s.optimal() ? OracleStatus::Optimal : OracleStatus::Limit;
    if (s.has_point) {
      out.objective = s.objective;
      out.point.assign(s.primal.begin(), s.primal.begin() + rmp.num_x);
      out.designs.assign(static_cast<std::size_t>(m.num_blocks()), std::nullopt);
      for (std::size_t k = 0; k < rmp.lambda_pool.size(); ++k) {
        if (s.primal[rmp.num_x + k] > 0.5) {
          const Column& c = pool[rmp.lambda_pool[k]];
          out.designs[c.block] = c.design;
        }
      }
    }
    if (s.optimal()) out.lower = out.objective;
  }
  out.wallclock_ms = ms_since(t0);
  return out;
}

}  // namespace bnp
