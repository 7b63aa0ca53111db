#include "bnp/interval.hpp"

#include <algorithm>
#include <cmath>

namespace bnp {

namespace {

double down(double v, int ulps = 1) {
  if (std::isinf(v) || std::isnan(v)) return v;
  for (int k = 0; k < ulps; ++k) v = std::nextafter(v, -kInf);
  return v;
}

double up(double v, int ulps = 1) {
  if (std::isinf(v) || std::isnan(v)) return v;
  for (int k = 0; k < ulps; ++k) v = std::nextafter(v, kInf);
  return v;
}

// inf * 0 shows up for unbounded factors; the limit is 0 for enclosure purposes.
double mul0(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

Interval padded(double lo, double hi, int ulps = 1) {
  if (std::isnan(lo)) lo = -kInf;
  if (std::isnan(hi)) hi = kInf;
  return {down(lo, ulps), up(hi, ulps)};
}

// libm transcendental functions are accurate to a few ulps, not correctly rounded.
constexpr int kLibmUlps = 4;

}  // namespace

double Interval::mid() const {
  if (std::isinf(lo) && std::isinf(hi)) return 0.0;
  if (std::isinf(lo)) return hi <= 0.0 ? hi - 1.0 : 0.0;
  if (std::isinf(hi)) return lo >= 0.0 ? lo + 1.0 : 0.0;
  return lo + 0.5 * (hi - lo);
}

Interval operator+(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return padded(a.lo + b.lo, a.hi + b.hi);
}

Interval operator-(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return padded(a.lo - b.hi, a.hi - b.lo);
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  const double p[4] = {mul0(a.lo, b.lo), mul0(a.lo, b.hi), mul0(a.hi, b.lo), mul0(a.hi, b.hi)};
  return padded(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

Interval operator/(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if (b.contains_zero()) return Interval::entire();
  const double inv_lo = 1.0 / b.hi;
  const double inv_hi = 1.0 / b.lo;
  return a * padded(inv_lo, inv_hi);
}

Interval sqr(const Interval& a) {
  if (a.is_empty()) return a;
  const double l2 = mul0(a.lo, a.lo);
  const double h2 = mul0(a.hi, a.hi);
  if (a.contains_zero()) return {0.0, up(std::max(l2, h2))};
  return {std::max(0.0, down(std::min(l2, h2))), up(std::max(l2, h2))};
}

Interval powi(const Interval& a, int n) {
  if (a.is_empty()) return a;
  if (n == 0) return {1.0, 1.0};
  if (n == 1) return a;
  if (n < 0) return Interval(1.0) / powi(a, -n);
  const int ulps = n + 1;
  const double pl = std::pow(a.lo, n);
  const double ph = std::pow(a.hi, n);
  if (n % 2 == 1) return padded(pl, ph, ulps);
  if (a.contains_zero()) return {0.0, up(std::max(pl, ph), ulps)};
  return {std::max(0.0, down(std::min(pl, ph), ulps)), up(std::max(pl, ph), ulps)};
}

Interval sqrt(const Interval& a) {
  if (a.is_empty() || a.hi < 0.0) return Interval::empty();
  const double lo = std::max(0.0, a.lo);
  return {std::max(0.0, down(std::sqrt(lo))), up(std::sqrt(a.hi))};
}

Interval exp(const Interval& a) {
  if (a.is_empty()) return a;
  return {std::max(0.0, down(std::exp(a.lo), kLibmUlps)), up(std::exp(a.hi), kLibmUlps)};
}

Interval log(const Interval& a) {
  if (a.is_empty() || a.hi <= 0.0) return Interval::empty();
  const double lo = a.lo <= 0.0 ? -kInf : down(std::log(a.lo), kLibmUlps);
  return {lo, up(std::log(a.hi), kLibmUlps)};
}

Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

Interval hull(const Interval& a, const Interval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval widen(const Interval& a, int ulps) {
  if (a.is_empty()) return a;
  return {down(a.lo, ulps), up(a.hi, ulps)};
}

bool Box::is_empty() const {
  return std::any_of(vars.begin(), vars.end(), [](const Interval& v) { return v.is_empty(); });
}

bool Box::round_integers() {
  for (int j = 0; j < size(); ++j) {
    if (j < static_cast<int>(integer.size()) && integer[j]) {
      vars[j].lo = std::ceil(vars[j].lo - 1e-9);
      vars[j].hi = std::floor(vars[j].hi + 1e-9);
    }
    if (vars[j].is_empty()) return false;
  }
  return true;
}

Enclosure interval_eval(const Expr& expr, const Box& box) {
  Enclosure out;
  switch (expr.kind()) {
    case ExprKind::Constant:
      out.range = expr.value();
      return out;
    case ExprKind::Variable: {
      const int i = expr.var_index();
      if (i < 0 || i >= box.size()) throw std::out_of_range("interval_eval: variable outside box");
      out.range = box.vars[i];
      if (out.range.is_empty()) out.empty = true;
      return out;
    }
    default: break;
  }

  std::vector<Enclosure> kids;
  kids.reserve(expr.children().size());
  for (const auto& c : expr.children()) {
    kids.push_back(interval_eval(c, box));
    if (kids.back().empty) {
      out.empty = true;
      out.range = Interval::empty();
      return out;
    }
    out.partial_domain = out.partial_domain || kids.back().partial_domain;
  }

  const auto& a = kids[0].range;
  switch (expr.kind()) {
    case ExprKind::Add:
      out.range = a;
      for (std::size_t k = 1; k < kids.size(); ++k) out.range = out.range + kids[k].range;
      break;
    case ExprKind::Mul:
      out.range = a;
      for (std::size_t k = 1; k < kids.size(); ++k) out.range = out.range * kids[k].range;
      break;
    case ExprKind::Sub: out.range = a - kids[1].range; break;
    case ExprKind::Div: {
      const auto& d = kids[1].range;
      if (d.lo == 0.0 && d.hi == 0.0) {
        out.empty = true;
        out.range = Interval::empty();
      } else if (d.contains_zero()) {
        out.partial_domain = true;
        out.range = Interval::entire();
      } else {
        out.range = a / d;
      }
      break;
    }
    case ExprKind::Neg: out.range = -a; break;
    case ExprKind::Sqr: out.range = sqr(a); break;
    case ExprKind::Powi:
      if (expr.exponent() < 0 && a.contains_zero()) {
        if (a.lo == 0.0 && a.hi == 0.0) {
          out.empty = true;
          out.range = Interval::empty();
        } else {
          out.partial_domain = true;
          out.range = Interval::entire();
        }
      } else {
        out.range = powi(a, expr.exponent());
      }
      break;
    case ExprKind::Sqrt:
      if (a.hi < 0.0) out.empty = true;
      if (a.lo < 0.0) out.partial_domain = true;
      out.range = sqrt(a);
      break;
    case ExprKind::Exp: out.range = exp(a); break;
    case ExprKind::Log:
      if (a.hi <= 0.0) out.empty = true;
      if (a.lo <= 0.0) out.partial_domain = true;
      out.range = log(a);
      break;
    default: break;
  }
  if (out.empty) out.range = Interval::empty();
  return out;
}

}  // namespace bnp
