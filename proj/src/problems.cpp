#include "bnp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "bnp/pricing.hpp"

namespace bnp {

void check_instance(const CircleCuttingInstance& inst) {
  if (inst.radii.empty() || inst.rectangles.empty()) throw std::invalid_argument("circle instance: empty");
  for (double r : inst.radii) {
    if (!(r > 0.0)) throw std::invalid_argument("circle instance: nonpositive radius");
  }
  for (const auto& rc : inst.rectangles) {
    if (!(rc.width > 0.0) || !(rc.height > 0.0)) throw std::invalid_argument("circle instance: nonpositive side");
  }
  for (std::size_t a = 0; a < inst.radii.size(); ++a) {
    const double d = 2.0 * inst.radii[a];
    const bool fits = std::any_of(inst.rectangles.begin(), inst.rectangles.end(),
                                  [&](const Rectangle& rc) { return d <= rc.width && d <= rc.height; });
    if (!fits) throw std::invalid_argument("circle instance: circle " + std::to_string(a) + " fits no rectangle");
  }
}

CircleCuttingInstance gen_circle_cutting(std::uint64_t seed, int max_circles, int max_rectangles) {
  std::mt19937_64 rng(seed);
  CircleCuttingInstance inst;
  inst.seed = seed;
  const int n = std::uniform_int_distribution<int>(1, std::min(max_circles, max_rectangles))(rng);
  const int m = std::uniform_int_distribution<int>(n, max_rectangles)(rng);
  std::uniform_int_distribution<int> quarter(2, 6), half(0, 6), side(3, 10);
  for (int a = 0; a < n; ++a) inst.radii.push_back(0.25 * quarter(rng));
  for (int k = 0; k < m; ++k) {
    if (k < n) {
      const double d = 2.0 * inst.radii[k];
      inst.rectangles.push_back({d + 0.5 * half(rng), d + 0.5 * half(rng)});
    } else {
      inst.rectangles.push_back({0.5 * side(rng), 0.5 * side(rng)});
    }
  }
  return inst;
}

StructuredModel encode_circle_cutting(const CircleCuttingInstance& inst) {
  check_instance(inst);
  const int n = static_cast<int>(inst.radii.size());
  StructuredModel m;
  m.name = "circle-cutting";
  m.num_rows = 2 * n;
  for (int a = 0; a < n; ++a) {
    m.b.push_back(1.0);
    m.b.push_back(-1.0);
  }
  for (std::size_t k = 0; k < inst.rectangles.size(); ++k) {
    const Rectangle& rc = inst.rectangles[k];
    const double area = rc.width * rc.height;
    Block blk;
    blk.id = static_cast<int>(k);
    blk.y_lo.assign(n, 0);
    blk.y_hi.assign(n, 1);
    blk.convexity = Convexity::AtMostOne;
    blk.linking_rows = m.num_rows;
    std::vector<Expr> unused, covered;
    auto y = [](int a) { return Expr::variable(a); };
    auto cx = [n](int a) { return Expr::variable(n + 2 * a); };
    auto cy = [n](int a) { return Expr::variable(n + 2 * a + 1); };
    for (int a = 0; a < n; ++a) {
      const double r = inst.radii[a];
      blk.z.push_back({0.0, rc.width, VarKind::Continuous, std::nullopt});
      blk.z.push_back({0.0, rc.height, VarKind::Continuous, std::nullopt});
      blk.entity_weights.push_back(std::numbers::pi * r * r);
      blk.linking.push_back({2 * a, a, 1.0});
      blk.linking.push_back({2 * a + 1, a, -1.0});
      unused.push_back(1.0 - y(a));
      covered.push_back(Expr::constant(std::numbers::pi * r * r) * y(a));
      const double mx = std::max(rc.width, r);
      const double my = std::max(rc.height, r);
      blk.constraints.push_back(Expr::constant(r) - cx(a) - mx * (1.0 - y(a)));
      blk.constraints.push_back(cx(a) - Expr::constant(rc.width - r) - mx * (1.0 - y(a)));
      blk.constraints.push_back(Expr::constant(r) - cy(a) - my * (1.0 - y(a)));
      blk.constraints.push_back(cy(a) - Expr::constant(rc.height - r) - my * (1.0 - y(a)));
      if (2.0 * r <= rc.width && 2.0 * r <= rc.height) {
        Design d(n, 0);
        d[a] = 1;
        m.initial_columns.push_back({blk.id, d, area - std::numbers::pi * r * r});
      }
    }
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const double rr = inst.radii[a] + inst.radii[b];
        const Expr gap = sqr(cx(a) - cx(b)) + sqr(cy(a) - cy(b));
        blk.constraints.push_back(Expr::constant(rr * rr) * y(a) * y(b) - gap);
      }
    }
    const Expr used = n == 1 ? y(0) : 1.0 - product(unused);
    blk.objective = Expr::constant(area) * used - (n == 1 ? covered[0] : sum(covered));
    m.blocks.push_back(std::move(blk));
  }
  return m;
}

void check_instance(const SharedDesignInstance& inst) {
  const std::size_t p = inst.processing_time.size();
  if (p == 0 || inst.max_units.size() != p || inst.alpha.size() != p) {
    throw std::invalid_argument("shared-design instance: stage data size mismatch");
  }
  if (inst.scenarios.empty()) throw std::invalid_argument("shared-design instance: no scenarios");
  double total = 0.0;
  for (const auto& s : inst.scenarios) {
    if (!(s.demand > 0.0)) throw std::invalid_argument("shared-design instance: nonpositive demand");
    if (!(s.probability >= 0.0)) throw std::invalid_argument("shared-design instance: negative probability");
    total += s.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("shared-design instance: probabilities do not sum to 1");
  for (std::size_t j = 0; j < p; ++j) {
    if (inst.max_units[j] < 1 || !(inst.processing_time[j] > 0.0)) {
      throw std::invalid_argument("shared-design instance: bad stage " + std::to_string(j));
    }
  }
  if (!(inst.beta > 0.0 && inst.beta <= 1.0)) throw std::invalid_argument("shared-design instance: beta outside (0,1]");
}

SharedDesignInstance default_shared_design() {
  SharedDesignInstance s;
  s.processing_time = {4.0, 6.0};
  s.max_units = {3, 3};
  s.alpha = {10.0, 15.0};
  s.scenarios = {{0.5, 2.0}, {0.5, 5.0}};
  return s;
}

StructuredModel encode_shared_design(const SharedDesignInstance& inst) {
  check_instance(inst);
  const int p = static_cast<int>(inst.processing_time.size());
  StructuredModel m;
  m.name = "shared-design";
  m.nonanticipativity = true;
  for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
    const Scenario& sc = inst.scenarios[s];
    Block blk;
    blk.id = static_cast<int>(s);
    blk.y_lo.assign(p, 1);
    blk.y_hi = inst.max_units;
    blk.monotone = true;
    std::vector<Expr> capital, operating;
    for (int j = 0; j < p; ++j) {
      const double t = inst.processing_time[j];
      const Expr n = Expr::variable(j);
      const Expr z = Expr::variable(p + j);
      blk.z.push_back({0.0, t, VarKind::Continuous, Expr::constant(t) / n});
      blk.constraints.push_back(Expr::constant(t) - n * z);
      blk.constraints.push_back(Expr::constant(sc.demand) * z - inst.horizon);
      capital.push_back(Expr::constant(inst.alpha[j]) * exp(Expr::constant(inst.beta) * log(n)));
      operating.push_back(sqr(z));
    }
    blk.objective = Expr::constant(sc.probability) *
                    (sum(capital) + Expr::constant(inst.gamma * sc.demand) * sum(operating));
    m.blocks.push_back(std::move(blk));
  }
  return m;
}

StructuredModel gen_branching_adversary(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int m = 2 * std::uniform_int_distribution<int>(1, 3)(rng) + 1;
  const double c = 1.0 + 0.25 * std::uniform_int_distribution<int>(0, 4)(rng);
  const double cx = c * (1.25 + 0.125 * std::uniform_int_distribution<int>(0, 4)(rng));
  StructuredModel model;
  model.name = "branching-adversary";
  model.x = {{VarKind::Continuous, static_cast<double>(m)}};
  model.c = {cx};
  model.num_rows = 1;
  model.a = {{0, 0, 1.0}};
  model.b = {0.5 * m};
  Block blk;
  blk.y_lo = {0};
  blk.y_hi = {m};
  const Expr y = Expr::variable(0);
  blk.objective = Expr::constant(c) * y;
  blk.constraints = {y * (static_cast<double>(m) - y)};
  blk.linking = {{0, 0, 1.0}};
  blk.linking_rows = 1;
  model.blocks.push_back(std::move(blk));
  return model;
}

namespace {

// Monomial coef * v1 [* v2]; with `anchor` >= 0 the first factor is that variable.
Expr monomial(std::mt19937_64& rng, int nvars, int anchor) {
  std::uniform_int_distribution<int> coef(-5, 5), var(0, nvars - 1), deg(0, 1);
  Expr m = Expr::constant(coef(rng)) * Expr::variable(anchor >= 0 ? anchor : var(rng));
  if (deg(rng)) m = m * Expr::variable(var(rng));
  return m;
}

Block random_block(std::mt19937_64& rng, int id, int rows, bool at_most_one) {
  std::uniform_int_distribution<int> pd(1, 3), wd(1, 3), coin(0, 1), lo_any(-1, 1), lo_amo(-1, 0);
  Block b;
  b.id = id;
  b.convexity = at_most_one ? Convexity::AtMostOne : Convexity::Equality;
  const int p = pd(rng);
  for (int j = 0; j < p; ++j) {
    std::int64_t lo = at_most_one ? lo_amo(rng) : lo_any(rng);
    std::int64_t hi = lo + wd(rng);
    if (at_most_one) hi = std::max<std::int64_t>(hi, 0);
    b.y_lo.push_back(lo);
    b.y_hi.push_back(hi);
  }
  if (coin(rng)) b.z.push_back({0.0, 2.0, VarKind::Integer, std::nullopt});
  const int nv = b.num_vars();
  std::uniform_int_distribution<int> yv(0, p - 1), cst(-5, 5), neg(-5, 0);
  auto poly = [&](int terms, double constant) {
    std::vector<Expr> t;
    // <= blocks: every monomial carries a y factor so y = 0 leaves only the constant.
    for (int k = 0; k < terms; ++k) t.push_back(monomial(rng, nv, at_most_one ? yv(rng) : -1));
    if (constant != 0.0) t.push_back(Expr::constant(constant));
    return sum(std::move(t));
  };
  b.objective = poly(3, at_most_one ? 0.0 : cst(rng));
  const int ng = 1 + coin(rng);
  for (int k = 0; k < ng; ++k) b.constraints.push_back(poly(2, at_most_one ? neg(rng) : cst(rng)));
  if (at_most_one) {
    // Keep f(0, z) = 0 attainable: penalize z away from 0 when y = 0 is chosen.
    if (b.num_z() > 0) b.objective = b.objective + Expr::variable(p);
  }
  b.linking_rows = rows;
  std::uniform_int_distribution<int> dv(-2, 3);
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < p; ++j) {
      const int v = dv(rng);
      if (v != 0) b.linking.push_back({r, j, static_cast<double>(v)});
    }
  }
  return b;
}

}  // namespace

StructuredModel gen_random_integer(std::uint64_t seed, const RandomIntegerOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nbd(1, options.max_blocks), rd(1, options.max_rows), coin(0, 1);
  std::uniform_int_distribution<int> cost(3, 8), rhs(-3, 6), kind(0, 2);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 10000) throw std::runtime_error("gen_random_integer: no admissible instance");
    StructuredModel m;
    m.name = "random-integer-" + std::to_string(seed);
    const int nb = nbd(rng);
    m.num_rows = rd(rng);
    for (int r = 0; r < m.num_rows; ++r) {
      m.x.push_back({kind(rng) == 0 ? VarKind::Integer : VarKind::Continuous, 40.0});
      m.c.push_back(cost(rng));
      m.a.push_back({r, r, 1.0});
      m.b.push_back(rhs(rng));
    }
    std::int64_t total = 0;
    double combos = 1.0;
    bool ok = true;
    for (int i = 0; i < nb && ok; ++i) {
      Block b = random_block(rng, i, m.num_rows, coin(rng) == 1);
      total += b.lattice_size();
      combos *= static_cast<double>(b.lattice_size() + 1);
      if (b.convexity == Convexity::Equality) {
        const BlockPrices zero{std::vector<double>(static_cast<std::size_t>(b.num_y()), 0.0), 0.0, 1.0};
        ok = enumerate_lattice(b, zero).feasible;
      }
      m.blocks.push_back(std::move(b));
    }
    if (!ok || total > options.max_total_designs || combos > 1e5) continue;
    return m;
  }
}

}  // namespace bnp
