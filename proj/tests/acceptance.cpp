// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bnp/bnp.hpp"
#include "bnp/oracles.hpp"
#include "bnp/problems.hpp"
#include "lp_oracle.hpp"
#include "master_oracle.hpp"

using namespace bnp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

int failures = 0;

// Keeps NaN, unlike std::max.
void worsen(double& worst, double v) {
  if (!(v <= worst)) worst = v;
}

void report(int id, const std::string& name, const std::function<void(Check&, std::ostringstream&)>& body) {
  Check c;
  std::ostringstream info;
  const auto t0 = Clock::now();
  try {
    body(c, info);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  if (!c.ok) ++failures;
  std::printf("%s criterion %d: %s (%.1f s) %s%s\n", c.ok ? "PASS" : "FAIL", id, name.c_str(), seconds_since(t0),
              info.str().c_str(), c.ok ? "" : (" | " + c.why.str()).c_str());
  std::fflush(stdout);
}

constexpr int kRandomInstances = 50;

std::vector<ValidatedModel> random_instances() {
  std::vector<ValidatedModel> out;
  for (int s = 1; s <= kRandomInstances; ++s) out.push_back(validate_or_throw(gen_random_integer(s)));
  return out;
}

std::vector<ValidatedModel> circle_instances() {
  std::vector<ValidatedModel> out;
  for (int s = 0; s < 10; ++s) out.push_back(validate_or_throw(encode_circle_cutting(gen_circle_cutting(s, 3, 3))));
  return out;
}

ValidatedModel analytic(std::vector<double> radii, Rectangle rect) {
  CircleCuttingInstance inst;
  inst.radii = std::move(radii);
  inst.rectangles = {rect};
  return validate_or_throw(encode_circle_cutting(inst));
}

BnpOptions tight() {
  BnpOptions o;
  o.gap = 1e-9;
  return o;
}

LinearProgram random_lp(std::mt19937_64& rng, bool positive_costs) {
  std::uniform_int_distribution<int> nd(1, 6), md(1, 6), coef(-4, 4), sense(0, 2), rhsd(-6, 10);
  LinearProgram lp;
  const int n = nd(rng);
  const int m = md(rng);
  for (int j = 0; j < n; ++j) {
    double c = coef(rng);
    if (positive_costs) c = std::abs(c) + 1.0;
    lp.add_column(c);
  }
  for (int r = 0; r < m; ++r) {
    const int s = sense(rng);
    lp.add_row(s == 0 ? Sense::Le : (s == 1 ? Sense::Ge : Sense::Eq), rhsd(rng));
    for (int j = 0; j < n; ++j) {
      const int v = coef(rng);
      if (v != 0) lp.set(r, j, v);
    }
  }
  if (!positive_costs) {
    const int r = lp.add_row(Sense::Le, 12.0);
    for (int j = 0; j < n; ++j) lp.set(r, j, 1.0);
  }
  return lp;
}

}  // namespace

int main() {
  const auto randoms = random_instances();
  const auto circles = circle_instances();

  report(1, "bound sandwich against the full master LP", [&](Check& c, std::ostringstream& info) {
    const auto t0 = Clock::now();
    long rows = 0;
    for (std::size_t k = 0; k < randoms.size(); ++k) {
      const auto& vm = randoms[k];
      const auto ref = testing::full_master_lp(vm.model());
      c.expect(ref.optimal(), "reference LP not optimal");
      if (!ref.optimal()) continue;
      MasterState st(vm);
      st.pool = init_columns(vm, InitStrategy::ZeroDualPricing).pool;
      ColgenOptions o;
      o.pricing.node_budget = 3;
      const auto r = solve_relaxed_mp(st, {}, o);
      c.expect(r.status == ColgenStatus::Converged, "colgen did not converge on instance " + std::to_string(k));
      c.expect(std::abs(r.v - ref.objective) <= 1e-6 * (1.0 + std::abs(ref.objective)),
               "final value differs on instance " + std::to_string(k));
      for (const auto& row : r.trace) {
        if (row.phase1) continue;
        ++rows;
        c.expect(row.v_rmp + row.sum_l <= ref.objective + 1e-6, "lower bound above the LP value");
        c.expect(ref.objective <= row.v_rmp + 1e-6, "restricted value below the LP value");
      }
    }
    const double t = seconds_since(t0);
    c.expect(t < 60.0, "runtime over 60 s");
    info << "[" << randoms.size() << " instances, " << rows << " iterations]";
  });

  report(2, "branch-and-price equals the master MILP enumeration", [&](Check& c, std::ostringstream& info) {
    double worst = 0.0;
    for (std::size_t k = 0; k < randoms.size(); ++k) {
      const double ref = testing::full_master_milp(randoms[k].model());
      const auto r = solve_bnp(randoms[k], tight());
      c.expect(r.status == BnpStatus::Optimal, "bnp not optimal on instance " + std::to_string(k));
      worsen(worst, std::abs(r.ub - ref));
    }
    c.expect(worst <= 1e-6, "objective mismatch");
    info << "[max |diff| " << worst << "]";
  });

  report(3, "circle cutting against the full-space global solver", [&](Check& c, std::ostringstream& info) {
    double worst = 0.0, slowest = 0.0;
    for (std::size_t k = 0; k < circles.size(); ++k) {
      const auto t0 = Clock::now();
      const auto r = solve_bnp(circles[k]);
      slowest = std::max(slowest, seconds_since(t0));
      GlobalOptions g;
      g.gap = 1e-4;
      const auto ref = solve_fullspace(circles[k], g, 300.0);
      c.expect(r.status == BnpStatus::Optimal, "bnp not optimal on instance " + std::to_string(k));
      c.expect(ref.status == OracleStatus::Optimal, "oracle not optimal on instance " + std::to_string(k));
      const double rel = std::abs(r.ub - ref.objective) / std::max(1.0, std::max(std::abs(r.ub), std::abs(ref.objective)));
      worsen(worst, rel);
    }
    c.expect(worst <= 1e-3, "relative mismatch above 1e-3");
    c.expect(slowest < 300.0, "an instance took 300 s or more");
    info << "[max rel diff " << worst << ", slowest bnp " << slowest << " s]";
  });

  report(4, "analytic circle packings", [&](Check& c, std::ostringstream& info) {
    const auto one = solve_bnp(analytic({1.0}, {2.0, 2.0}));
    const auto two = solve_bnp(analytic({1.0, 1.0}, {4.0, 2.0}));
    const double e1 = std::abs(one.ub - (4.0 - std::numbers::pi));
    const double e2 = std::abs(two.ub - (8.0 - 2.0 * std::numbers::pi));
    c.expect(e1 <= 1e-4, "one circle off");
    c.expect(e2 <= 1e-4, "two circles off");
    info << "[objectives " << one.ub << ", " << two.ub << "; errors " << e1 << ", " << e2 << "]";
  });

  report(5, "branching adversary", [&](Check& c, std::ostringstream& info) {
    int most = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto vm = validate_or_throw(gen_branching_adversary(s));
      const auto r = solve_bnp(vm, tight());
      const auto ref = enumerate_columns(vm);
      c.expect(r.root_fractional, "root was integral");
      c.expect(r.nodes <= 7, "more than 7 nodes");
      c.expect(ref.status == OracleStatus::Optimal, "enumeration did not solve");
      c.expect(std::abs(r.ub - ref.objective) <= 1e-6, "objective mismatch");
      most = std::max(most, r.nodes);
    }
    info << "[max nodes " << most << "]";
  });

  report(6, "pricing budget 1 reaches the exact-pricing objective", [&](Check& c, std::ostringstream&) {
    for (std::size_t k = 0; k < randoms.size(); ++k) {
      BnpOptions small = tight();
      small.colgen.pricing.node_budget = 1;
      BnpOptions exact = tight();
      exact.colgen.budget_first = false;
      const auto a = solve_bnp(randoms[k], small);
      const auto b = solve_bnp(randoms[k], exact);
      c.expect(a.status == BnpStatus::Optimal && b.status == BnpStatus::Optimal, "not optimal");
      c.expect(std::abs(a.ub - b.ub) <= 1e-6, "objective differs on instance " + std::to_string(k));
    }
  });

  report(7, "shared designs and infeasibility cuts", [&](Check& c, std::ostringstream& info) {
    const auto vm = validate_or_throw(encode_shared_design(default_shared_design()));
    const auto r = solve_bnp(vm, tight());
    c.expect(r.status == BnpStatus::Optimal && r.incumbent.has_value(), "not solved");
    if (r.incumbent) {
      for (const auto& b : r.incumbent->blocks) c.expect(b.y == r.incumbent->blocks[0].y, "designs differ");
    }
    // Independently re-check every pooled design in every scenario.
    std::set<Design> designs;
    for (const auto& col : r.columns) designs.insert(col.design);
    for (const auto& ic : r.infeasible_columns) designs.insert(ic.design);
    int infeasible = 0;
    for (const auto& d : designs) {
      for (int i = 0; i < vm->num_blocks(); ++i) {
        const bool dead = solve_fixed_design(vm->blocks[i], d, {}).status == PricingStatus::Infeasible;
        bool marked = false;
        for (const auto& ic : r.infeasible_columns) marked = marked || (ic.block == i && ic.design == d);
        if (dead) {
          ++infeasible;
          c.expect(marked, "infeasible shared column not recorded");
        } else {
          c.expect(!marked, "feasible column marked infeasible");
        }
      }
    }
    c.expect(infeasible > 0, "no infeasible shared column arose");
    for (int i = 0; i < vm->num_blocks(); ++i) {
      int cuts = 0;
      for (const auto& ic : r.infeasible_columns) {
        if (ic.block == i) cuts += static_cast<int>(ic.design.size()) + 1;
      }
      c.expect(r.cut_rows[i] == cuts, "cut rows do not match the recorded columns");
    }
    Block b;
    b.y_lo = {1, 1};
    b.y_hi = {4, 4};
    b.objective = Expr::constant(0.0);
    b.monotone = true;
    add_infeasibility_cut(b, {2, 1}, CutStyle::MonotoneStage);
    c.expect(b.constraints.size() == 3, "monotone cut for (2, 1) is not three constraints");
    info << "[" << r.infeasible_columns.size() << " infeasible shared columns]";
  });

  report(8, "worker count does not change the result", [&](Check& c, std::ostringstream&) {
    std::vector<std::pair<const ValidatedModel*, BnpOptions>> runs;
    for (const auto& vm : randoms) runs.push_back({&vm, tight()});
    for (const auto& vm : circles) runs.push_back({&vm, BnpOptions{}});
    const auto a1 = analytic({1.0}, {2.0, 2.0});
    const auto a2 = analytic({1.0, 1.0}, {4.0, 2.0});
    runs.push_back({&a1, BnpOptions{}});
    runs.push_back({&a2, BnpOptions{}});
    for (std::size_t k = 0; k < runs.size(); ++k) {
      BnpOptions o1 = runs[k].second, o8 = runs[k].second;
      o1.colgen.workers = 1;
      o8.colgen.workers = 8;
      const auto a = solve_bnp(*runs[k].first, o1);
      const auto b = solve_bnp(*runs[k].first, o8);
      c.expect(a.ub == b.ub && a.lb == b.lb && a.columns_generated == b.columns_generated &&
                   a.pool_size == b.pool_size,
               "run " + std::to_string(k) + " differs");
    }
  });

  report(9, "LP strong duality against vertex enumeration", [&](Check& c, std::ostringstream& info) {
    std::mt19937_64 rng(2024);
    int solved = 0;
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const auto lp = random_lp(rng, t % 2 == 0);
      const auto s = solve_lp(lp);
      const auto ref = testing::enumerate_vertices(lp);
      c.expect((s.status == LpStatus::Optimal) == ref.feasible, "feasibility disagrees");
      if (!ref.feasible || !s.optimal()) continue;
      ++solved;
      c.expect(std::abs(s.objective - ref.objective) <= 1e-8 * (1.0 + std::abs(ref.objective)), "objective differs");
      double dual = 0.0;
      for (int r = 0; r < lp.num_rows(); ++r) dual += lp.rhs[r] * s.dual[r];
      const double gap = std::abs(s.objective - dual) / (1.0 + std::abs(s.objective));
      worsen(worst, gap);
    }
    c.expect(worst <= 1e-8, "duality gap above tolerance");
    info << "[" << solved << " feasible of 200, max scaled gap " << worst << "]";
  });

  return failures;
}
