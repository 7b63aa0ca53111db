#pragma once

// Random expressions and blocks for property tests.

#include <random>
#include <vector>

#include "bnp/expr.hpp"
#include "bnp/model.hpp"

namespace bnp::testing {

/// Random tree over variables [0, nvars) using every primitive.
inline Expr random_expr(std::mt19937_64& rng, int nvars, int depth) {
  std::uniform_int_distribution<int> leaf(0, 2);
  std::uniform_real_distribution<double> cst(-3.0, 3.0);
  if (depth <= 0) {
    if (leaf(rng) == 0) return Expr::constant(std::round(cst(rng) * 4.0) / 4.0);
    return Expr::variable(std::uniform_int_distribution<int>(0, nvars - 1)(rng));
  }
  auto sub = [&] { return random_expr(rng, nvars, depth - 1); };
  switch (std::uniform_int_distribution<int>(0, 11)(rng)) {
    case 0: return sub() + sub();
    case 1: return sub() - sub();
    case 2: return sub() * sub();
    case 3: return sub() / sub();
    case 4: return -sub();
    case 5: return sqr(sub());
    case 6: return sqrt(sub());
    case 7: return powi(sub(), std::uniform_int_distribution<int>(-2, 4)(rng));
    case 8: return exp(sub());
    case 9: return log(sub());
    case 10: return sum({sub(), sub(), sub()});
    default: return product({sub(), sub(), sub()});
  }
}

/// Small polynomial over integer variables: sum of a few random monomials.
inline Expr random_poly(std::mt19937_64& rng, int nvars, int terms) {
  std::uniform_int_distribution<int> coef(-5, 5), var(0, nvars - 1), deg(1, 2);
  std::vector<Expr> out;
  for (int t = 0; t < terms; ++t) {
    Expr m = Expr::constant(coef(rng));
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) m = m * Expr::variable(var(rng));
    out.push_back(m);
  }
  out.push_back(Expr::constant(coef(rng)));
  return sum(std::move(out));
}

/// Pure-integer block: p y-components in small boxes, optionally integer z,
/// nonconvex polynomial objective, one or two polynomial constraints.
inline Block random_integer_block(std::mt19937_64& rng, int id, int rows) {
  std::uniform_int_distribution<int> pd(1, 3), lod(-1, 1), wd(1, 3), coin(0, 1);
  Block b;
  b.id = id;
  const int p = pd(rng);
  for (int j = 0; j < p; ++j) {
    const int lo = lod(rng);
    b.y_lo.push_back(lo);
    b.y_hi.push_back(lo + wd(rng));
  }
  if (coin(rng)) b.z.push_back({0.0, 2.0, VarKind::Integer, std::nullopt});
  const int nv = b.num_vars();
  b.objective = random_poly(rng, nv, 3);
  const int ng = 1 + coin(rng);
  for (int k = 0; k < ng; ++k) b.constraints.push_back(random_poly(rng, nv, 2));
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

}  // namespace bnp::testing
