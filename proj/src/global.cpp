#include "bnp/global.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace bnp {

const char* status_name(GlobalStatus s) {
  switch (s) {
    case GlobalStatus::Optimal: return "optimal";
    case GlobalStatus::BoundsOnly: return "bounds-only";
    case GlobalStatus::Infeasible: return "infeasible";
  }
  return "?";
}

namespace {

// Expression flattened in post-order; the root is the last node.
class Tape {
 public:
  explicit Tape(const Expr& e) { root_ = emit(e); }

  // Forward pass. Returns false if no point of the box is in the domain.
  bool forward(const Box& box) {
    val_.assign(nodes_.size(), Interval());
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
      const Node& nd = nodes_[n];
      Interval& v = val_[n];
      auto kid = [&](int k) -> const Interval& { return val_[nd.kids[k]]; };
      switch (nd.kind) {
        case ExprKind::Constant: v = nd.value; break;
        case ExprKind::Variable: v = box.vars[nd.var]; break;
        case ExprKind::Add:
          v = kid(0);
          for (std::size_t k = 1; k < nd.kids.size(); ++k) v = v + kid(static_cast<int>(k));
          break;
        case ExprKind::Mul:
          v = kid(0);
          for (std::size_t k = 1; k < nd.kids.size(); ++k) v = v * kid(static_cast<int>(k));
          break;
        case ExprKind::Sub: v = kid(0) - kid(1); break;
        case ExprKind::Div:
          if (kid(1).lo == 0.0 && kid(1).hi == 0.0) return false;
          v = kid(0) / kid(1);
          break;
        case ExprKind::Neg: v = -kid(0); break;
        case ExprKind::Sqr: v = sqr(kid(0)); break;
        case ExprKind::Powi:
          if (nd.exponent < 0 && kid(0).lo == 0.0 && kid(0).hi == 0.0) return false;
          v = (nd.exponent < 0 && kid(0).contains_zero()) ? Interval::entire() : powi(kid(0), nd.exponent);
          break;
        case ExprKind::Sqrt: v = sqrt(kid(0)); break;
        case ExprKind::Exp: v = exp(kid(0)); break;
        case ExprKind::Log: v = log(kid(0)); break;
      }
      if (v.is_empty()) return false;
    }
    return true;
  }

  // Backward pass after forward(); narrows box. Returns false on emptiness.
  bool backward(Interval target, Box& box) {
    val_[root_] = intersect(val_[root_], target);
    if (val_[root_].is_empty()) return false;
    for (int n = root_; n >= 0; --n) {
      const Node& nd = nodes_[n];
      const Interval out = val_[n];
      auto narrow = [&](int k, const Interval& by) {
        Interval& t = val_[nd.kids[k]];
        t = intersect(t, by);
        return !t.is_empty();
      };
      auto kid = [&](int k) -> const Interval& { return val_[nd.kids[k]]; };
      const int nk = static_cast<int>(nd.kids.size());
      switch (nd.kind) {
        case ExprKind::Constant:
          if (!out.contains(nd.value)) return false;
          break;
        case ExprKind::Variable: {
          Interval& b = box.vars[nd.var];
          b = intersect(b, out);
          if (b.is_empty()) return false;
          break;
        }
        case ExprKind::Add:
          for (int k = 0; k < nk; ++k) {
            Interval others = 0.0;
            for (int m = 0; m < nk; ++m) {
              if (m != k) others = others + kid(m);
            }
            if (!narrow(k, out - others)) return false;
          }
          break;
        case ExprKind::Mul:
          for (int k = 0; k < nk; ++k) {
            Interval others = 1.0;
            for (int m = 0; m < nk; ++m) {
              if (m != k) others = others * kid(m);
            }
            if (others.contains_zero()) continue;
            if (!narrow(k, out / others)) return false;
          }
          break;
        case ExprKind::Sub:
          if (!narrow(0, out + kid(1))) return false;
          if (!narrow(1, kid(0) - out)) return false;
          break;
        case ExprKind::Div:
          if (!narrow(0, out * kid(1))) return false;
          if (!out.contains_zero() && !narrow(1, kid(0) / out)) return false;
          break;
        case ExprKind::Neg:
          if (!narrow(0, -out)) return false;
          break;
        case ExprKind::Sqr:
          if (!narrow(0, even_preimage(kid(0), out, 2))) return false;
          break;
        case ExprKind::Powi:
          if (nd.exponent > 1 && nd.exponent % 2 == 0) {
            if (!narrow(0, even_preimage(kid(0), out, nd.exponent))) return false;
          } else if (nd.exponent > 1) {
            if (!narrow(0, {odd_root(out.lo, nd.exponent, -1), odd_root(out.hi, nd.exponent, 1)})) return false;
          } else if (nd.exponent == 1) {
            if (!narrow(0, out)) return false;
          }
          break;
        case ExprKind::Sqrt:
          if (!narrow(0, sqr(intersect(out, {0.0, kInf})))) return false;
          if (!narrow(0, {0.0, kInf})) return false;
          break;
        case ExprKind::Exp:
          if (out.hi <= 0.0) return false;
          if (!narrow(0, log(intersect(out, {0.0, kInf})))) return false;
          break;
        case ExprKind::Log:
          if (!narrow(0, exp(out))) return false;
          if (!narrow(0, {0.0, kInf})) return false;
          break;
      }
    }
    return true;
  }

  const Interval& root_value() const { return val_[root_]; }

 private:
  struct Node {
    ExprKind kind = ExprKind::Constant;
    double value = 0.0;
    int var = -1;
    int exponent = 0;
    std::vector<int> kids;
  };

  int emit(const Expr& e) {
    Node nd;
    nd.kind = e.kind();
    if (nd.kind == ExprKind::Constant) nd.value = e.value();
    if (nd.kind == ExprKind::Variable) nd.var = e.var_index();
    if (nd.kind == ExprKind::Powi) nd.exponent = e.exponent();
    for (const auto& c : e.children()) nd.kids.push_back(emit(c));
    nodes_.push_back(std::move(nd));
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Relative padding generous enough to cover pow(v, 1/n) error.
  static double pad(double v, int dir) {
    if (std::isinf(v)) return v;
    const double m = std::abs(v) * 1e-12 + 1e-300;
    return dir > 0 ? v + m : v - m;
  }

  // Narrows c to the preimage of out under t -> t^n, n even: the hull of
  // c intersected with [s, r] and [-r, -s].
  static Interval even_preimage(const Interval& c, const Interval& out, int n) {
    if (out.hi < 0.0) return Interval::empty();
    const double r = pad(std::pow(out.hi, 1.0 / n), 1);
    const double s = out.lo <= 0.0 ? 0.0 : std::max(0.0, pad(std::pow(out.lo, 1.0 / n), -1));
    return hull(intersect(c, {s, r}), intersect(c, {-r, -s}));
  }

  static double odd_root(double v, int n, int dir) {
    if (std::isinf(v)) return v;
    const double r = std::copysign(std::pow(std::abs(v), 1.0 / n), v);
    return pad(r, dir);
  }

  std::vector<Node> nodes_;
  std::vector<Interval> val_;
  int root_ = -1;
};

struct OpenBox {
  Box box;
  double lb = -kInf;
  long id = 0;
};

struct WorseBox {
  bool operator()(const OpenBox& a, const OpenBox& b) const {
    if (a.lb != b.lb) return a.lb > b.lb;
    return a.id > b.id;
  }
};

class Searcher {
 public:
  Searcher(const GlobalProblem& p, const GlobalOptions& o) : p_(p), o_(o), obj_(p.objective) {
    for (const auto& g : p.constraints) cons_.emplace_back(g);
    const int n = p.num_vars();
    in_objective_.assign(n, false);
    std::vector<int> vars;
    collect_variables(p.objective, vars);
    for (int v : vars) in_objective_[v] = true;
    for (const auto& g : p.constraints) {
      std::vector<int> gv;
      collect_variables(g, gv);
      cons_vars_.push_back(std::move(gv));
    }
    for (int j = 0; j < n; ++j) range_.push_back(std::max(p.bounds[j].width(), 1e-12));
  }

  GlobalResult run() {
    Box root{p_.bounds, p_.integer};
    root.integer.resize(root.vars.size(), false);
    std::priority_queue<OpenBox, std::vector<OpenBox>, WorseBox> open;
    if (root.round_integers()) open.push({std::move(root), -kInf, next_id_++});

    bool hit_limit = false;
    while (!open.empty()) {
      if (prunable(open.top().lb)) {
        floor_ = std::min(floor_, open.top().lb);
        break;
      }
      if (res_.nodes >= o_.node_limit ||
          (o_.deadline && (res_.nodes & 63) == 0 && std::chrono::steady_clock::now() >= *o_.deadline)) {
        hit_limit = true;
        break;
      }
      OpenBox node = open.top();
      open.pop();
      ++res_.nodes;
      process(std::move(node), open);
    }
    double lower = std::min(res_.upper, floor_);
    while (!open.empty()) {
      lower = std::min(lower, open.top().lb);
      open.pop();
    }
    res_.lower = lower;
    const bool closed = res_.upper - res_.lower <= gap_tol(res_.upper);
    if (hit_limit) {
      res_.status = GlobalStatus::BoundsOnly;
    } else if (!res_.has_point() && res_.unresolved == 0) {
      res_.status = GlobalStatus::Infeasible;
      res_.lower = kInf;
    } else {
      res_.status = closed ? GlobalStatus::Optimal : GlobalStatus::BoundsOnly;
    }
    return res_;
  }

 private:
  double gap_tol(double u) const { return o_.gap * (1.0 + std::abs(u)); }

  bool prunable(double lb) const {
    return std::isfinite(res_.upper) && lb >= res_.upper - gap_tol(res_.upper);
  }

  template <class Queue>
  void process(OpenBox node, Queue& open) {
    Box& box = node.box;
    if (!tighten(box)) {
      ++res_.prunes;
      return;
    }
    if (!obj_.forward(box)) {
      ++res_.prunes;
      return;
    }
    const double lb = std::max(node.lb, obj_.root_value().lo);
    try_candidates(box);
    if (prunable(lb)) {
      ++res_.prunes;
      floor_ = std::min(floor_, lb);
      return;
    }

    std::vector<bool> relevant = in_objective_;
    for (std::size_t c = 0; c < cons_.size(); ++c) {
      const bool ok = cons_[c].forward(box);
      if (ok && cons_[c].root_value().hi <= o_.feasibility_tol) continue;
      for (int v : cons_vars_[c]) relevant[v] = true;
    }
    const int j = pick_branch(box, relevant);
    if (j < 0) {
      ++res_.unresolved;
      floor_ = std::min(floor_, lb);
      return;
    }
    const Interval& v = box.vars[j];
    OpenBox left{box, lb, next_id_++};
    OpenBox right{box, lb, next_id_++};
    if (box.integer[j]) {
      const double cut = std::floor(v.mid());
      left.box.vars[j].hi = std::min(cut, v.hi - 1.0);
      right.box.vars[j].lo = left.box.vars[j].hi + 1.0;
    } else {
      const double m = v.mid();
      left.box.vars[j].hi = m;
      right.box.vars[j].lo = m;
    }
    open.push(std::move(left));
    open.push(std::move(right));
  }

  // Forward-backward propagation over every constraint and the objective cut.
  bool tighten(Box& box) {
    for (int pass = 0; pass < o_.contraction_passes; ++pass) {
      const std::vector<Interval> before = box.vars;
      for (auto& t : cons_) {
        if (!t.forward(box) || !t.backward({-kInf, o_.feasibility_tol}, box)) return false;
        if (!box.round_integers()) return false;
      }
      if (std::isfinite(res_.upper)) {
        if (!obj_.forward(box) || !obj_.backward({-kInf, res_.upper}, box)) return false;
        if (!box.round_integers()) return false;
      }
      bool progress = false;
      for (int j = 0; j < box.size() && !progress; ++j) {
        const double w0 = before[j].width();
        progress = box.vars[j].width() < 0.99 * w0;
      }
      if (!progress) break;
    }
    return true;
  }

  int pick_branch(const Box& box, const std::vector<bool>& relevant) const {
    int best = -1;
    double best_w = 0.0;
    for (int j = 0; j < box.size(); ++j) {
      if (!relevant[j]) continue;
      const double w = box.vars[j].width();
      if (box.integer[j]) {
        if (w < 1.0) continue;
      } else if (!(w > 1e-9 * (1.0 + range_[j]))) {
        continue;
      }
      const double scaled = w / range_[j];
      const bool better = best < 0 || scaled > best_w ||
                          (scaled == best_w && box.integer[j] && !box.integer[best]);
      if (better) {
        best = j;
        best_w = scaled;
      }
    }
    return best;
  }

  void try_candidates(const Box& box) {
    const int n = box.size();
    std::vector<double> pt(n);
    for (int c = 0; c < 3; ++c) {
      for (int j = 0; j < n; ++j) {
        const Interval& v = box.vars[j];
        double x = c == 0 ? v.mid() : (c == 1 ? v.lo : v.hi);
        if (!std::isfinite(x)) x = v.mid();
        if (box.integer[j]) x = std::clamp(std::round(x), v.lo, v.hi);
        pt[j] = x;
      }
      consider(pt);
    }
  }

  void consider(const std::vector<double>& pt) {
    double f = 0.0;
    try {
      for (const auto& g : p_.constraints) {
        if (!(eval_expr(g, pt) <= o_.feasibility_tol)) return;
      }
      f = eval_expr(p_.objective, pt);
    } catch (const EvalError&) {
      return;
    }
    if (f < res_.upper) {
      res_.upper = f;
      res_.point = pt;
    }
  }

  const GlobalProblem& p_;
  const GlobalOptions& o_;
  Tape obj_;
  std::vector<Tape> cons_;
  std::vector<std::vector<int>> cons_vars_;
  std::vector<bool> in_objective_;
  std::vector<double> range_;
  GlobalResult res_;
  double floor_ = kInf;
  long next_id_ = 0;
};

}  // namespace

bool contract(const Expr& expr, Interval target, Box& box) {
  Tape t(expr);
  if (!t.forward(box) || !t.backward(target, box)) return false;
  return box.round_integers();
}

GlobalResult solve_global(const GlobalProblem& problem, const GlobalOptions& options) {
  if (problem.integer.size() != problem.bounds.size()) {
    throw std::invalid_argument("solve_global: integrality mask size mismatch");
  }
  for (const auto& b : problem.bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi)) throw std::invalid_argument("solve_global: unbounded variable");
  }
  return Searcher(problem, options).run();
}

}  // namespace bnp
