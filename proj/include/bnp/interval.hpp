#pragma once

#include <vector>

#include "bnp/expr.hpp"
#include "bnp/types.hpp"

namespace bnp {

/// Closed interval [lo, hi]. Endpoints may be infinite. An interval with
/// lo > hi is empty; operations propagate emptiness.
///
/// Every operation rounds outward by at least one ulp, so results enclose the
/// exact image even though the hardware rounds to nearest.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double v) : lo(v), hi(v) {}  // NOLINT: points convert implicitly
  Interval(double l, double h) : lo(l), hi(h) {}

  static Interval entire() { return {-kInf, kInf}; }
  static Interval empty() { return {kInf, -kInf}; }

  bool is_empty() const { return !(lo <= hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains_zero() const { return contains(0.0); }
  double width() const { return is_empty() ? 0.0 : hi - lo; }
  /// Finite point inside the interval (0 when the interval is entire).
  double mid() const;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
/// Requires 0 not in b; returns entire() otherwise.
Interval operator/(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);

Interval sqr(const Interval& a);
Interval powi(const Interval& a, int n);
/// Image over the part of a inside the domain; empty if none.
Interval sqrt(const Interval& a);
Interval exp(const Interval& a);
Interval log(const Interval& a);

Interval intersect(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);
/// Moves the endpoints outward by `ulps` representable doubles.
Interval widen(const Interval& a, int ulps = 1);

struct Box {
  std::vector<Interval> vars;
  std::vector<bool> integer;

  int size() const { return static_cast<int>(vars.size()); }
  bool is_empty() const;
  /// Rounds integer endpoints inward. Returns false if some variable became empty.
  bool round_integers();
};

struct Enclosure {
  /// Contains the value at every point of the box where the expression is defined.
  Interval range;
  /// No point of the box lies in the expression's domain.
  bool empty = false;
  /// Some (not all) points of the box lie outside the domain.
  bool partial_domain = false;
};

Enclosure interval_eval(const Expr& expr, const Box& box);

}  // namespace bnp
