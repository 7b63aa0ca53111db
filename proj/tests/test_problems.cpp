#include <cmath>
#include <numbers>

#include "bnp/pricing.hpp"
#include "bnp/problems.hpp"
#include "doctest.h"
#include "master_oracle.hpp"

using namespace bnp;

TEST_CASE("circle instances are validated") {
  CircleCuttingInstance inst;
  inst.radii = {1.0};
  inst.rectangles = {{1.5, 3.0}};
  CHECK_THROWS_AS(check_instance(inst), std::invalid_argument);
  inst.rectangles.push_back({2.0, 2.0});
  CHECK_NOTHROW(check_instance(inst));
  inst.radii.push_back(-0.1);
  CHECK_THROWS_AS(check_instance(inst), std::invalid_argument);
}

TEST_CASE("generated circle instances are admissible and reproducible") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = gen_circle_cutting(seed);
    const auto b = gen_circle_cutting(seed);
    CHECK_NOTHROW(check_instance(a));
    CHECK(a.radii == b.radii);
    CHECK(a.radii.size() <= a.rectangles.size());
    CHECK(a.radii.size() <= 3);
    for (std::size_t k = 0; k < a.radii.size(); ++k) {
      CHECK(2.0 * a.radii[k] <= std::min(a.rectangles[k].width, a.rectangles[k].height) + 1e-12);
    }
    CHECK(validate_model(encode_circle_cutting(a)).ok());
  }
}

TEST_CASE("circle encoding: one circle in a 2x2 square") {
  CircleCuttingInstance inst;
  inst.radii = {1.0};
  inst.rectangles = {{2.0, 2.0}};
  const auto m = encode_circle_cutting(inst);
  REQUIRE(m.num_blocks() == 1);
  CHECK(m.num_rows == 2);
  const Block& b = m.blocks[0];
  CHECK(b.convexity == Convexity::AtMostOne);
  CHECK(b.num_y() == 1);
  CHECK(b.num_z() == 2);
  // Centered circle: feasible, leftover area 4 - pi.
  CHECK(block_point_feasible(b, std::vector<double>{1.0, 1.0, 1.0}, 1e-9));
  CHECK(eval_expr(b.objective, std::vector<double>{1.0, 1.0, 1.0}) == doctest::Approx(4.0 - std::numbers::pi));
  CHECK_FALSE(block_point_feasible(b, std::vector<double>{1.0, 0.5, 1.0}, 1e-9));
  // Unassigned: centers are free and the block costs nothing.
  CHECK(block_point_feasible(b, std::vector<double>{0.0, 0.0, 0.0}, 1e-9));
  CHECK(eval_expr(b.objective, std::vector<double>{0.0, 0.3, 1.7}) == 0.0);
}

TEST_CASE("circle encoding: two circles must not overlap") {
  CircleCuttingInstance inst;
  inst.radii = {1.0, 1.0};
  inst.rectangles = {{4.0, 2.0}};
  const Block b = encode_circle_cutting(inst).blocks[0];
  // y = (1, 1), centers (1, 1) and (3, 1).
  CHECK(block_point_feasible(b, std::vector<double>{1, 1, 1, 1, 3, 1}, 1e-9));
  CHECK_FALSE(block_point_feasible(b, std::vector<double>{1, 1, 1, 1, 2.5, 1}, 1e-9));
  CHECK(eval_expr(b.objective, std::vector<double>{1, 1, 1, 1, 3, 1}) ==
        doctest::Approx(8.0 - 2.0 * std::numbers::pi));
  // Pricing with zero duals on the fixed design recovers the packing.
  const auto r = solve_pricing(b, BlockPrices{{0.0, 0.0}, 0.0, 1.0}, {}, YBounds{{1, 1}, {1, 1}});
  REQUIRE(r.has_point());
  CHECK(r.upper == doctest::Approx(8.0 - 2.0 * std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("shared design encoding") {
  const auto inst = default_shared_design();
  CHECK_NOTHROW(check_instance(inst));
  const auto m = encode_shared_design(inst);
  CHECK(m.nonanticipativity);
  REQUIRE(m.num_blocks() == 2);
  for (const auto& b : m.blocks) {
    CHECK(b.monotone);
    CHECK(b.y_lo == Design{1, 1});
    CHECK(b.y_hi == Design{3, 3});
    for (const auto& z : b.z) CHECK(z.closed_form.has_value());
  }
  // Low demand Q = 2: (1, 2) gives cycle times (4, 3), 2*4 <= 10.
  CHECK(solve_fixed_design(m.blocks[0], {1, 2}, {}).status == PricingStatus::Optimal);
  // High demand Q = 5 needs max cycle <= 2: (1, 2) fails, (2, 3) works.
  CHECK(solve_fixed_design(m.blocks[1], {1, 2}, {}).status == PricingStatus::Infeasible);
  const auto ok = solve_fixed_design(m.blocks[1], {2, 3}, {});
  REQUIRE(ok.status == PricingStatus::Optimal);
  const double expect = 0.5 * (10.0 * std::pow(2.0, 0.6) + 15.0 * std::pow(3.0, 0.6) + 0.1 * 5.0 * (4.0 + 4.0));
  CHECK(ok.upper == doctest::Approx(expect).epsilon(1e-6));

  auto bad = inst;
  bad.scenarios[0].probability = 0.7;
  CHECK_THROWS_AS(check_instance(bad), std::invalid_argument);
}

TEST_CASE("branching adversary: fractional root, integer optimum uses x") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = gen_branching_adversary(seed);
    REQUIRE(validate_model(m).ok());
    const double mm = static_cast<double>(m.blocks[0].y_hi[0]);
    CHECK(std::fmod(mm, 2.0) == 1.0);
    const auto designs = testing::all_designs(m.blocks[0]);
    REQUIRE(designs.size() == 2);
    const double c = designs[1].cost / mm;
    const auto lp = testing::full_master_lp(m);
    REQUIRE(lp.optimal());
    CHECK(lp.objective == doctest::Approx(c * mm / 2.0));
    CHECK(testing::full_master_milp(m) == doctest::Approx(m.c[0] * mm / 2.0));
    CHECK(testing::full_master_milp(m) > lp.objective + 1e-6);
  }
}

TEST_CASE("random integer models respect their size caps") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto m = gen_random_integer(seed);
    CAPTURE(seed);
    REQUIRE(validate_model(m).ok());
    CHECK(m.num_blocks() <= 4);
    CHECK(m.num_rows <= 3);
    std::int64_t total = 0;
    for (const auto& b : m.blocks) {
      CHECK(b.pure_integer());
      total += b.lattice_size();
      const auto d = testing::all_designs(b);
      if (b.convexity == Convexity::Equality) CHECK_FALSE(d.empty());
      if (b.convexity == Convexity::AtMostOne) {
        const Design zero(b.y_lo.size(), 0);
        CHECK(solve_fixed_design(b, zero, {}).status == PricingStatus::Optimal);
        CHECK(solve_fixed_design(b, zero, {}).upper == doctest::Approx(0.0));
      }
    }
    CHECK(total <= 200);
    CHECK(std::isfinite(testing::full_master_milp(m)));
  }
  const auto a = gen_random_integer(42);
  const auto b = gen_random_integer(42);
  CHECK(a.b == b.b);
  CHECK(a.c == b.c);
}
