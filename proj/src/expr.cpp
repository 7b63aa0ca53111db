#include "bnp/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bnp {

struct Expr::Node {
  ExprKind kind = ExprKind::Constant;
  double value = 0.0;
  int index = 0;  // variable index or powi exponent
  std::vector<Expr> children;
};

const char* kind_name(ExprKind kind) {
  switch (kind) {
    case ExprKind::Constant: return "const";
    case ExprKind::Variable: return "var";
    case ExprKind::Add: return "add";
    case ExprKind::Sub: return "sub";
    case ExprKind::Mul: return "mul";
    case ExprKind::Div: return "div";
    case ExprKind::Neg: return "neg";
    case ExprKind::Sqr: return "sqr";
    case ExprKind::Sqrt: return "sqrt";
    case ExprKind::Powi: return "powi";
    case ExprKind::Exp: return "exp";
    case ExprKind::Log: return "log";
  }
  return "?";
}

namespace {

std::size_t arity(ExprKind kind) {
  switch (kind) {
    case ExprKind::Constant:
    case ExprKind::Variable: return 0;
    case ExprKind::Sub:
    case ExprKind::Div: return 2;
    case ExprKind::Add:
    case ExprKind::Mul: return static_cast<std::size_t>(-1);
    default: return 1;
  }
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Variable;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::make(ExprKind kind, std::vector<Expr> children, int exponent) {
  if (kind == ExprKind::Constant || kind == ExprKind::Variable) {
    throw std::invalid_argument("use Expr::constant / Expr::variable for leaves");
  }
  const std::size_t want = arity(kind);
  if (want == static_cast<std::size_t>(-1)) {
    if (children.empty()) throw std::invalid_argument(std::string(kind_name(kind)) + " needs operands");
  } else if (children.size() != want) {
    throw std::invalid_argument(std::string(kind_name(kind)) + " has wrong operand count");
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->index = exponent;
  n->children = std::move(children);
  return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::var_index() const { return node_->index; }
int Expr::exponent() const { return node_->index; }
std::span<const Expr> Expr::children() const { return node_->children; }

bool Expr::same_as(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case ExprKind::Constant: return value() == other.value();
    case ExprKind::Variable: return var_index() == other.var_index();
    default: break;
  }
  if (node_->index != other.node_->index) return false;
  auto a = children();
  auto b = other.children();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].same_as(b[i])) return false;
  }
  return true;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(ExprKind::Add, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(ExprKind::Sub, {a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(ExprKind::Mul, {a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(ExprKind::Div, {a, b}); }
Expr operator-(const Expr& a) { return Expr::make(ExprKind::Neg, {a}); }
Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }

Expr sqr(const Expr& e) { return Expr::make(ExprKind::Sqr, {e}); }
Expr sqrt(const Expr& e) { return Expr::make(ExprKind::Sqrt, {e}); }
Expr powi(const Expr& e, int exponent) { return Expr::make(ExprKind::Powi, {e}, exponent); }
Expr exp(const Expr& e) { return Expr::make(ExprKind::Exp, {e}); }
Expr log(const Expr& e) { return Expr::make(ExprKind::Log, {e}); }

Expr sum(std::vector<Expr> terms) {
  if (terms.empty()) return Expr::constant(0.0);
  if (terms.size() == 1) return terms.front();
  return Expr::make(ExprKind::Add, std::move(terms));
}

Expr product(std::vector<Expr> factors) {
  if (factors.empty()) return Expr::constant(1.0);
  if (factors.size() == 1) return factors.front();
  return Expr::make(ExprKind::Mul, std::move(factors));
}

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
  return v;
}

}  // namespace

double eval_expr(const Expr& expr, std::span<const double> x) {
  auto ch = expr.children();
  switch (expr.kind()) {
    case ExprKind::Constant: return expr.value();
    case ExprKind::Variable: {
      auto i = static_cast<std::size_t>(expr.var_index());
      if (i >= x.size()) throw EvalError("variable index outside assignment");
      return checked(x[i], "var");
    }
    case ExprKind::Add: {
      double s = 0.0;
      for (const auto& c : ch) s += eval_expr(c, x);
      return checked(s, "add");
    }
    case ExprKind::Sub: return checked(eval_expr(ch[0], x) - eval_expr(ch[1], x), "sub");
    case ExprKind::Mul: {
      double p = 1.0;
      for (const auto& c : ch) p *= eval_expr(c, x);
      return checked(p, "mul");
    }
    case ExprKind::Div: {
      const double den = eval_expr(ch[1], x);
      if (den == 0.0) throw EvalError("division by zero");
      return checked(eval_expr(ch[0], x) / den, "div");
    }
    case ExprKind::Neg: return -eval_expr(ch[0], x);
    case ExprKind::Sqr: {
      const double v = eval_expr(ch[0], x);
      return checked(v * v, "sqr");
    }
    case ExprKind::Sqrt: {
      const double v = eval_expr(ch[0], x);
      if (v < 0.0) throw EvalError("sqrt of negative argument");
      return std::sqrt(v);
    }
    case ExprKind::Powi: {
      const double v = eval_expr(ch[0], x);
      if (expr.exponent() < 0 && v == 0.0) throw EvalError("division by zero in powi");
      return checked(std::pow(v, expr.exponent()), "powi");
    }
    case ExprKind::Exp: return checked(std::exp(eval_expr(ch[0], x)), "exp");
    case ExprKind::Log: {
      const double v = eval_expr(ch[0], x);
      if (v <= 0.0) throw EvalError("log of non-positive argument");
      return std::log(v);
    }
  }
  throw EvalError("unknown expression kind");
}

int max_variable_index(const Expr& expr) {
  if (expr.kind() == ExprKind::Variable) return expr.var_index();
  int m = -1;
  for (const auto& c : expr.children()) m = std::max(m, max_variable_index(c));
  return m;
}

namespace {

void gather_variables(const Expr& expr, std::vector<int>& out) {
  if (expr.kind() == ExprKind::Variable) {
    out.push_back(expr.var_index());
    return;
  }
  for (const auto& c : expr.children()) gather_variables(c, out);
}

}  // namespace

void collect_variables(const Expr& expr, std::vector<int>& out) {
  gather_variables(expr, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

Expr remap_variables(const Expr& expr, std::span<const int> mapping) {
  switch (expr.kind()) {
    case ExprKind::Constant: return expr;
    case ExprKind::Variable: return Expr::variable(mapping[static_cast<std::size_t>(expr.var_index())]);
    default: break;
  }
  std::vector<Expr> kids;
  kids.reserve(expr.children().size());
  for (const auto& c : expr.children()) kids.push_back(remap_variables(c, mapping));
  return Expr::make(expr.kind(), std::move(kids), expr.exponent());
}

std::vector<std::string> check_expr(const Expr& expr, int num_vars) {
  std::vector<std::string> problems;
  auto visit = [&](auto&& self, const Expr& e) -> void {
    switch (e.kind()) {
      case ExprKind::Constant:
        if (!std::isfinite(e.value())) problems.emplace_back("non-finite constant");
        return;
      case ExprKind::Variable:
        if (e.var_index() >= num_vars) {
          problems.push_back("dangling variable-ref: index " + std::to_string(e.var_index()));
        }
        return;
      case ExprKind::Div:
        if (e.children()[1].is_constant(0.0)) problems.emplace_back("division by constant zero");
        break;
      default: break;
    }
    for (const auto& c : e.children()) self(self, c);
  };
  visit(visit, expr);
  return problems;
}

std::string to_string(const Expr& expr) {
  std::ostringstream os;
  switch (expr.kind()) {
    case ExprKind::Constant: os << expr.value(); return os.str();
    case ExprKind::Variable: os << 'v' << expr.var_index(); return os.str();
    default: break;
  }
  os << '(' << kind_name(expr.kind());
  if (expr.kind() == ExprKind::Powi) os << ' ' << expr.exponent();
  for (const auto& c : expr.children()) os << ' ' << to_string(c);
  os << ')';
  return os.str();
}

}  // namespace bnp
