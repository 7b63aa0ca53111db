#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnp {

enum class ExprKind {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Sqr,
  Sqrt,
  Powi,
  Exp,
  Log,
};

const char* kind_name(ExprKind kind);

/// Thrown by eval_expr on a domain violation or a non-finite intermediate.
class EvalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Immutable expression tree over block-local variables.
///
/// Variables are referenced by index. Inside a block, indices [0, p) are the
/// linking y-variables and [p, p + nz) the z-variables. Nodes are shared, so
/// copying an Expr is cheap and copies may be used from several threads.
class Expr {
 public:
  Expr();

  static Expr constant(double value);
  static Expr variable(int index);
  static Expr make(ExprKind kind, std::vector<Expr> children, int exponent = 0);

  ExprKind kind() const;
  double value() const;
  int var_index() const;
  int exponent() const;
  std::span<const Expr> children() const;

  bool is_constant() const { return kind() == ExprKind::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  /// Structural identity, used for deduplicating cuts and in tests.
  bool same_as(const Expr& other) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, double b);
Expr operator-(const Expr& a, double b);
Expr operator*(double a, const Expr& b);
Expr operator-(double a, const Expr& b);

Expr sqr(const Expr& e);
Expr sqrt(const Expr& e);
Expr powi(const Expr& e, int exponent);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);

/// Exact recursive evaluation. Throws EvalError on division by zero,
/// log/sqrt outside their domain, or any non-finite intermediate value.
double eval_expr(const Expr& expr, std::span<const double> assignment);

/// Largest referenced variable index, or -1 if the expression is variable-free.
int max_variable_index(const Expr& expr);
/// Appends the referenced indices to out, leaving out sorted and unique.
void collect_variables(const Expr& expr, std::vector<int>& out);

/// Rewrites every variable index i into mapping[i].
Expr remap_variables(const Expr& expr, std::span<const int> mapping);

/// Problems found while checking structural invariants (powi exponents,
/// literal zero denominators, variable range).
std::vector<std::string> check_expr(const Expr& expr, int num_vars);

std::string to_string(const Expr& expr);

}  // namespace bnp
