#pragma once

#include <cstdint>
#include <vector>

#include "bnp/model.hpp"

namespace bnp {

struct Rectangle {
  double width = 0.0;
  double height = 0.0;
};

struct CircleCuttingInstance {
  std::vector<double> radii;
  std::vector<Rectangle> rectangles;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument if a size is nonpositive or some circle fits no rectangle.
void check_instance(const CircleCuttingInstance& inst);

/// Random instance with at most `max_circles` circles and `max_rectangles`
/// rectangles, built so that circle k fits rectangle k.
CircleCuttingInstance gen_circle_cutting(std::uint64_t seed, int max_circles = 3, int max_rectangles = 3);

/// One block per rectangle. y_a assigns circle a; z holds the centers
/// (cx_0, cy_0, cx_1, ...). Objective: rectangle area if anything is cut,
/// minus the cut circle areas. Every circle is cut exactly once.
StructuredModel encode_circle_cutting(const CircleCuttingInstance& inst);

struct Scenario {
  double probability = 0.0;
  double demand = 0.0;
};

struct SharedDesignInstance {
  /// Per stage: processing time and unit-count upper bound (lower bound 1).
  std::vector<double> processing_time;
  std::vector<std::int64_t> max_units;
  /// Per stage capital cost alpha_j * N_j^beta.
  std::vector<double> alpha;
  double beta = 0.6;
  /// Operating cost weight on squared cycle times.
  double gamma = 0.1;
  double horizon = 10.0;
  std::vector<Scenario> scenarios;
};

void check_instance(const SharedDesignInstance& inst);

/// Two stages, a low- and a high-demand scenario.
SharedDesignInstance default_shared_design();

/// One block per scenario, designs tied by non-anticipativity. y_j = units
/// at stage j, z_j = cycle time with t_j <= N_j z_j and Q_s z_j <= H.
StructuredModel encode_shared_design(const SharedDesignInstance& inst);

/// One block, y in [0, m] with m odd, restricted to {0, m} by y (m - y) <= 0,
/// and a covering row y + x >= m / 2 that the root relaxation meets with
/// half of each design.
StructuredModel gen_branching_adversary(std::uint64_t seed);

struct RandomIntegerOptions {
  int max_blocks = 4;
  int max_rows = 3;
  std::int64_t max_total_designs = 200;
};

/// Random pure-integer block model: small y boxes, optional integer z,
/// nonconvex polynomial objectives and constraints, slack x columns that
/// keep the master feasible. Blocks with <= convexity admit y = 0 at cost 0.
StructuredModel gen_random_integer(std::uint64_t seed, const RandomIntegerOptions& options = {});

}  // namespace bnp
