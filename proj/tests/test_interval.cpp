#include <cmath>
#include <random>

#include "bnp/global.hpp"
#include "bnp/interval.hpp"
#include "doctest.h"
#include "random_expr.hpp"

using namespace bnp;

namespace {

Box box_of(std::vector<Interval> v) {
  Box b;
  b.integer.assign(v.size(), false);
  b.vars = std::move(v);
  return b;
}

}  // namespace

TEST_CASE("sqr over [-1, 2] is [0, 4], not the product bound") {
  const auto e = interval_eval(sqr(Expr::variable(0)), box_of({{-1.0, 2.0}}));
  CHECK(e.range.lo == 0.0);
  CHECK(e.range.hi >= 4.0);
  CHECK(e.range.hi == doctest::Approx(4.0));
  const auto m = interval_eval(Expr::variable(0) * Expr::variable(0), box_of({{-1.0, 2.0}}));
  CHECK(m.range.lo < -1.0);
}

TEST_CASE("[1,2] + [3,4] = [4,6]") {
  const auto e = interval_eval(Expr::variable(0) + Expr::variable(1), box_of({{1.0, 2.0}, {3.0, 4.0}}));
  CHECK(e.range.lo <= 4.0);
  CHECK(e.range.hi >= 6.0);
  CHECK(e.range.lo == doctest::Approx(4.0));
  CHECK(e.range.hi == doctest::Approx(6.0));
  CHECK_FALSE(e.empty);
  CHECK_FALSE(e.partial_domain);
}

TEST_CASE("division by an interval containing zero is flagged") {
  const auto e = interval_eval(Expr::variable(0) / Expr::variable(1), box_of({{1.0, 2.0}, {-1.0, 1.0}}));
  CHECK(e.partial_domain);
  CHECK_FALSE(e.empty);
  const auto z = interval_eval(Expr::variable(0) / Expr::variable(1), box_of({{1.0, 2.0}, {0.0, 0.0}}));
  CHECK(z.empty);
}

TEST_CASE("log and sqrt domain markers") {
  const Expr x = Expr::variable(0);
  CHECK(interval_eval(log(x), box_of({{-2.0, 0.0}})).empty);
  CHECK(interval_eval(sqrt(x), box_of({{-2.0, -1.0}})).empty);
  const auto part = interval_eval(log(x), box_of({{-1.0, 1.0}}));
  CHECK(part.partial_domain);
  CHECK(part.range.hi >= 0.0);
}

TEST_CASE("outward rounding encloses inexact sums") {
  const auto e = interval_eval(Expr::variable(0) + Expr::constant(0.2), box_of({{0.1, 0.1}}));
  CHECK(e.range.lo < e.range.hi);
  CHECK(e.range.contains(0.1 + 0.2));
}

TEST_CASE("enclosure property on random expressions") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-4.0, 4.0), w(0.0, 3.0), t(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Expr e = testing::random_expr(rng, 3, 3);
    std::vector<Interval> vars;
    for (int j = 0; j < 3; ++j) {
      const double lo = u(rng);
      vars.emplace_back(lo, lo + w(rng));
    }
    const Box box = box_of(vars);
    const auto enc = interval_eval(e, box);
    for (int s = 0; s < 5; ++s) {
      std::vector<double> pt;
      for (const auto& v : vars) pt.push_back(v.lo + t(rng) * (v.hi - v.lo));
      if (s == 0) pt = {vars[0].lo, vars[1].hi, vars[2].lo};
      double val = 0.0;
      try {
        val = eval_expr(e, pt);
      } catch (const EvalError&) {
        continue;
      }
      ++checked;
      CAPTURE(to_string(e));
      REQUIRE_FALSE(enc.empty);
      CHECK(enc.range.contains(val));
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("sub-box enclosures are contained in the parent enclosure") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0), w(0.0, 2.0), t(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Expr e = testing::random_expr(rng, 2, 3);
    std::vector<Interval> vars, sub;
    for (int j = 0; j < 2; ++j) {
      const double lo = u(rng);
      const double hi = lo + w(rng);
      vars.emplace_back(lo, hi);
      const double a = lo + t(rng) * (hi - lo);
      sub.emplace_back(a, a + t(rng) * (hi - a));
    }
    const auto big = interval_eval(e, box_of(vars));
    const auto small = interval_eval(e, box_of(sub));
    if (big.empty) {
      CHECK(small.empty);
      continue;
    }
    if (small.empty) continue;
    CAPTURE(to_string(e));
    CHECK(small.range.lo >= big.range.lo);
    CHECK(small.range.hi <= big.range.hi);
  }
}

TEST_CASE("contraction keeps every feasible point and narrows boxes") {
  // x^2 + y^2 <= 1 on [-3,3]^2 narrows to [-1,1]^2.
  const Expr g = sqr(Expr::variable(0)) + sqr(Expr::variable(1)) - 1.0;
  Box b = box_of({{-3.0, 3.0}, {-3.0, 3.0}});
  REQUIRE(contract(g, {-kInf, 0.0}, b));
  CHECK(b.vars[0].lo == doctest::Approx(-1.0));
  CHECK(b.vars[0].hi == doctest::Approx(1.0));
  CHECK(b.vars[0].lo <= -1.0);
  CHECK(b.vars[0].hi >= 1.0);

  // x^2 >= 4 with x in [-1, 3]: only [2, 3] survives.
  const Expr h = 4.0 - sqr(Expr::variable(0));
  Box c = box_of({{-1.0, 3.0}});
  REQUIRE(contract(h, {-kInf, 0.0}, c));
  CHECK(c.vars[0].lo == doctest::Approx(2.0));
  CHECK(c.vars[0].lo <= 2.0);

  // Infeasible: exp(x) <= 0.
  Box d = box_of({{-1.0, 1.0}});
  CHECK_FALSE(contract(exp(Expr::variable(0)), {-kInf, 0.0}, d));

  // Integer rounding after contraction: 2x <= 3 on integers -> x <= 1.
  Box i = box_of({{0.0, 5.0}});
  i.integer = {true};
  REQUIRE(contract(2.0 * Expr::variable(0) - Expr::constant(3.0), {-kInf, 0.0}, i));
  CHECK(i.vars[0].hi == 1.0);
}

TEST_CASE("random contraction never removes a feasible sample") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int trial = 0; trial < 400; ++trial) {
    const Expr g = testing::random_expr(rng, 2, 3);
    const std::vector<Interval> vars{{-2.0, 2.5}, {0.5, 3.0}};
    Box b = box_of(vars);
    const bool alive = contract(g, {-kInf, 0.0}, b);
    for (int s = 0; s < 20; ++s) {
      const std::vector<double> pt{vars[0].lo + t(rng) * 4.5, vars[1].lo + t(rng) * 2.5};
      double v = 0.0;
      try {
        v = eval_expr(g, pt);
      } catch (const EvalError&) {
        continue;
      }
      if (v > 0.0) continue;
      CAPTURE(to_string(g));
      REQUIRE(alive);
      CHECK(b.vars[0].contains(pt[0]));
      CHECK(b.vars[1].contains(pt[1]));
    }
  }
}

TEST_CASE("global solve of a nonconvex continuous problem") {
  // min (x^2 - 1)^2 + 0.1 x on [-2, 2]: global minimum near x = -1.
  GlobalProblem p;
  p.bounds = {{-2.0, 2.0}};
  p.integer = {false};
  const Expr x = Expr::variable(0);
  p.objective = sqr(sqr(x) - 1.0) + Expr::constant(0.1) * x;
  const auto r = solve_global(p);
  REQUIRE(r.status == GlobalStatus::Optimal);
  CHECK(r.point[0] == doctest::Approx(-1.0).epsilon(0.02));
  CHECK(r.lower <= r.upper);
  CHECK(r.upper - r.lower <= 1e-7 * (1.0 + std::abs(r.upper)));
}

TEST_CASE("global solve detects infeasibility") {
  GlobalProblem p;
  p.bounds = {{0.0, 3.0}, {0.0, 3.0}};
  p.integer = {true, false};
  p.objective = Expr::variable(0) + Expr::variable(1);
  // y must be 1.5 (non-integer) and nonnegative z below zero
  p.constraints = {sqr(Expr::variable(0) - 1.5) - 0.01, Expr::variable(1) + 1.0};
  const auto r = solve_global(p);
  CHECK(r.status == GlobalStatus::Infeasible);
  CHECK_FALSE(r.has_point());
}
