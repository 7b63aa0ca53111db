#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bnp/expr.hpp"
#include "bnp/types.hpp"

namespace bnp {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How the master's convexity row for a block is written.
/// AtMostOne allows choosing no column, which stands for the all-zero design.
enum class Convexity { Equality, AtMostOne };

struct ZVar {
  double lo = 0.0;
  double hi = 0.0;
  VarKind kind = VarKind::Continuous;
  /// Optional optimal value of this variable as a function of y alone
  /// (references y-indices only). Lets the lattice oracle handle
  /// continuous z without a nested solve.
  std::optional<Expr> closed_form;
};

/// One independent subproblem: min f(y,z) s.t. g(y,z) <= 0, y integer in a box.
/// Expression variable indices: [0, p) are y, [p, p + nz) are z.
struct Block {
  int id = 0;
  std::vector<std::int64_t> y_lo;
  std::vector<std::int64_t> y_hi;
  std::vector<ZVar> z;
  Expr objective;
  std::vector<Expr> constraints;
  /// Linking matrix D_i as (complicating row, y-component, value).
  std::vector<SparseEntry> linking;
  int linking_rows = 0;
  Convexity convexity = Convexity::Equality;
  /// Optional per-component branching weights (e.g. circle areas).
  std::vector<double> entity_weights;
  /// Feasibility is monotone in y: if y is feasible, so is y + e_j.
  bool monotone = false;

  int num_y() const { return static_cast<int>(y_lo.size()); }
  int num_z() const { return static_cast<int>(z.size()); }
  int num_vars() const { return num_y() + num_z(); }
  bool pure_integer() const;
  /// Number of points of the y-lattice (saturates at INT64_MAX).
  std::int64_t lattice_size() const;
};

struct XVar {
  VarKind kind = VarKind::Continuous;
  double hi = kInf;  // lower bound is always 0
};

struct InitialColumn {
  int block = 0;
  Design design;
  double cost = 0.0;
};

/// min c^T x + sum_i f_i(y_i, z_i)  s.t.  A x + sum_i D_i y_i >= b,  blocks.
struct StructuredModel {
  std::string name;
  std::vector<XVar> x;
  std::vector<double> c;
  int num_rows = 0;
  std::vector<SparseEntry> a;
  std::vector<double> b;
  std::vector<Block> blocks;
  /// All blocks are scenario copies of one design; designs must coincide.
  bool nonanticipativity = false;
  /// Instance-declared designs with known optimal costs.
  std::vector<InitialColumn> initial_columns;

  int num_x() const { return static_cast<int>(x.size()); }
  int num_blocks() const { return static_cast<int>(blocks.size()); }
};

/// A model whose invariants have been checked. Immutable and cheap to copy.
class ValidatedModel {
 public:
  const StructuredModel& model() const { return *model_; }
  const StructuredModel* operator->() const { return model_.get(); }
  const StructuredModel& operator*() const { return *model_; }
  std::shared_ptr<const StructuredModel> shared() const { return model_; }

 private:
  friend struct ModelValidator;
  explicit ValidatedModel(std::shared_ptr<const StructuredModel> m) : model_(std::move(m)) {}
  std::shared_ptr<const StructuredModel> model_;
};

struct ValidationResult {
  std::optional<ValidatedModel> model;
  std::vector<std::string> errors;

  bool ok() const { return model.has_value(); }
};

ValidationResult validate_model(StructuredModel model);
ValidationResult validate_model(const ValidatedModel& model);
/// Validates and throws ModelError listing every violation.
ValidatedModel validate_or_throw(StructuredModel model);

/// True if `point` (y components first, then z) lies in the block's box,
/// respects integrality, and satisfies every g <= tol.
bool block_point_feasible(const Block& block, std::span<const double> point, double tol);

struct FlatVar {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  bool integer = false;
};

struct LinearRow {
  std::vector<std::pair<int, double>> terms;
  Sense sense = Sense::Ge;
  double rhs = 0.0;
};

/// The undecomposed problem over one flat variable vector (x, y_0, z_0, y_1, ...).
struct MonolithicMinlp {
  std::vector<FlatVar> vars;
  Expr objective;
  std::vector<LinearRow> linear_rows;
  std::vector<Expr> constraints;  // each g <= 0
  std::vector<int> y_offset;      // per block
  std::vector<int> z_offset;      // per block
  int num_nonanticipativity_rows = 0;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_constraints() const { return static_cast<int>(linear_rows.size() + constraints.size()); }
};

MonolithicMinlp flatten_fullspace(const ValidatedModel& model);

}  // namespace bnp
