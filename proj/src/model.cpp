#include "bnp/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace bnp {

const char* sense_name(Sense s) {
  switch (s) {
    case Sense::Le: return "<=";
    case Sense::Ge: return ">=";
    case Sense::Eq: return "=";
  }
  return "?";
}

bool Block::pure_integer() const {
  for (const auto& v : z) {
    if (v.kind == VarKind::Continuous) return false;
  }
  return true;
}

std::int64_t Block::lattice_size() const {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t n = 1;
  for (int j = 0; j < num_y(); ++j) {
    const std::int64_t w = y_hi[j] - y_lo[j] + 1;
    if (w <= 0) return 0;
    if (n > kMax / w) return kMax;
    n *= w;
  }
  return n;
}

struct ModelValidator {
  static ValidatedModel wrap(StructuredModel m) {
    return ValidatedModel(std::make_shared<const StructuredModel>(std::move(m)));
  }
};

namespace {

void check_block(const StructuredModel& m, const Block& blk, std::vector<std::string>& errors) {
  const std::string where = "block " + std::to_string(blk.id) + ": ";
  const int p = blk.num_y();
  if (blk.y_hi.size() != blk.y_lo.size()) {
    errors.push_back(where + "dimension mismatch between y_lo and y_hi");
    return;
  }
  for (int j = 0; j < p; ++j) {
    if (blk.y_lo[j] > blk.y_hi[j]) {
      errors.push_back(where + "empty y box in component " + std::to_string(j));
    }
  }
  for (int k = 0; k < blk.num_z(); ++k) {
    const auto& zv = blk.z[k];
    if (!std::isfinite(zv.lo) || !std::isfinite(zv.hi)) {
      errors.push_back(where + "unbounded z" + std::to_string(k));
    } else if (zv.lo > zv.hi) {
      errors.push_back(where + "empty z box in z" + std::to_string(k));
    } else if (zv.kind == VarKind::Integer && std::ceil(zv.lo) > std::floor(zv.hi)) {
      errors.push_back(where + "empty z box in z" + std::to_string(k));
    }
    if (zv.closed_form) {
      if (zv.kind != VarKind::Continuous) {
        errors.push_back(where + "closed form declared for integer z" + std::to_string(k));
      }
      if (max_variable_index(*zv.closed_form) >= p) {
        errors.push_back(where + "closed form of z" + std::to_string(k) + " references z");
      }
      for (auto& e : check_expr(*zv.closed_form, p)) errors.push_back(where + e);
    }
  }
  if (blk.linking_rows != m.num_rows) {
    errors.push_back(where + "linking matrix row mismatch (" + std::to_string(blk.linking_rows) +
                     " vs " + std::to_string(m.num_rows) + ")");
  }
  for (const auto& e : blk.linking) {
    if (e.row < 0 || e.row >= m.num_rows) {
      errors.push_back(where + "linking matrix row mismatch (entry row " + std::to_string(e.row) + ")");
    }
    if (e.col < 0 || e.col >= p) {
      errors.push_back(where + "dimension mismatch in linking column " + std::to_string(e.col));
    }
    if (!std::isfinite(e.value)) errors.push_back(where + "non-finite linking coefficient");
  }
  for (auto& e : check_expr(blk.objective, blk.num_vars())) errors.push_back(where + "objective: " + e);
  for (std::size_t g = 0; g < blk.constraints.size(); ++g) {
    for (auto& e : check_expr(blk.constraints[g], blk.num_vars())) {
      errors.push_back(where + "constraint " + std::to_string(g) + ": " + e);
    }
  }
  if (!blk.entity_weights.empty() && static_cast<int>(blk.entity_weights.size()) != p) {
    errors.push_back(where + "dimension mismatch in entity weights");
  }
}

}  // namespace

ValidationResult validate_model(StructuredModel m) {
  std::vector<std::string> errors;
  if (m.c.size() != m.x.size()) errors.emplace_back("dimension mismatch: c has " + std::to_string(m.c.size()) +
                                                    " entries for " + std::to_string(m.x.size()) + " x-variables");
  for (std::size_t j = 0; j < m.x.size(); ++j) {
    if (!(m.x[j].hi >= 0.0)) errors.push_back("empty x box for x" + std::to_string(j));
  }
  if (m.num_rows < 0) errors.emplace_back("dimension mismatch: negative row count");
  if (static_cast<int>(m.b.size()) != m.num_rows) {
    errors.emplace_back("dimension mismatch: b has " + std::to_string(m.b.size()) + " entries for " +
                        std::to_string(m.num_rows) + " rows");
  }
  for (const auto& e : m.a) {
    if (e.row < 0 || e.row >= m.num_rows || e.col < 0 || e.col >= m.num_x()) {
      errors.emplace_back("dimension mismatch: A entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                          ") out of range");
    }
  }
  std::set<int> ids;
  for (const auto& blk : m.blocks) {
    if (!ids.insert(blk.id).second) errors.push_back("duplicate block id " + std::to_string(blk.id));
    check_block(m, blk, errors);
  }
  if (m.nonanticipativity && !m.blocks.empty()) {
    const auto& first = m.blocks.front();
    for (const auto& blk : m.blocks) {
      if (blk.y_lo != first.y_lo || blk.y_hi != first.y_hi) {
        errors.push_back("non-anticipativity: block " + std::to_string(blk.id) + " design space differs");
      }
      if (blk.linking_rows != first.linking_rows) {
        errors.push_back("non-anticipativity: block " + std::to_string(blk.id) + " linking shape differs");
      }
    }
  }
  for (const auto& col : m.initial_columns) {
    if (col.block < 0 || col.block >= m.num_blocks()) {
      errors.push_back("initial column refers to missing block " + std::to_string(col.block));
      continue;
    }
    const auto& blk = m.blocks[col.block];
    if (static_cast<int>(col.design.size()) != blk.num_y()) {
      errors.emplace_back("dimension mismatch in initial column design");
      continue;
    }
    for (int j = 0; j < blk.num_y(); ++j) {
      if (col.design[j] < blk.y_lo[j] || col.design[j] > blk.y_hi[j]) {
        errors.emplace_back("initial column design outside y box");
        break;
      }
    }
  }
  if (!errors.empty()) return {std::nullopt, std::move(errors)};
  return {ModelValidator::wrap(std::move(m)), {}};
}

ValidationResult validate_model(const ValidatedModel& model) { return {model, {}}; }

ValidatedModel validate_or_throw(StructuredModel model) {
  auto r = validate_model(std::move(model));
  if (!r.ok()) {
    std::ostringstream os;
    os << "invalid model:";
    for (const auto& e : r.errors) os << "\n  " << e;
    throw ModelError(os.str());
  }
  return *r.model;
}

bool block_point_feasible(const Block& block, std::span<const double> point, double tol) {
  if (static_cast<int>(point.size()) != block.num_vars()) return false;
  for (int j = 0; j < block.num_y(); ++j) {
    const double v = point[j];
    if (v != std::round(v)) return false;
    if (v < static_cast<double>(block.y_lo[j]) || v > static_cast<double>(block.y_hi[j])) return false;
  }
  for (int k = 0; k < block.num_z(); ++k) {
    const double v = point[block.num_y() + k];
    const auto& zv = block.z[k];
    if (zv.kind == VarKind::Integer && v != std::round(v)) return false;
    if (v < zv.lo - tol || v > zv.hi + tol) return false;
  }
  try {
    for (const auto& g : block.constraints) {
      if (eval_expr(g, point) > tol) return false;
    }
    (void)eval_expr(block.objective, point);
  } catch (const EvalError&) {
    return false;
  }
  return true;
}

MonolithicMinlp flatten_fullspace(const ValidatedModel& vm) {
  const auto& m = vm.model();
  MonolithicMinlp out;
  std::vector<Expr> objective_terms;
  for (int j = 0; j < m.num_x(); ++j) {
    out.vars.push_back({"x" + std::to_string(j), 0.0, m.x[j].hi, m.x[j].kind == VarKind::Integer});
    if (m.c[j] != 0.0) objective_terms.push_back(m.c[j] * Expr::variable(j));
  }
  for (const auto& blk : m.blocks) {
    const int y0 = out.num_vars();
    out.y_offset.push_back(y0);
    for (int j = 0; j < blk.num_y(); ++j) {
      out.vars.push_back({"b" + std::to_string(blk.id) + ".y" + std::to_string(j),
                          static_cast<double>(blk.y_lo[j]), static_cast<double>(blk.y_hi[j]), true});
    }
    out.z_offset.push_back(out.num_vars());
    for (int k = 0; k < blk.num_z(); ++k) {
      const auto& zv = blk.z[k];
      out.vars.push_back({"b" + std::to_string(blk.id) + ".z" + std::to_string(k), zv.lo, zv.hi,
                          zv.kind == VarKind::Integer});
    }
    std::vector<int> mapping(static_cast<std::size_t>(blk.num_vars()));
    for (int v = 0; v < blk.num_vars(); ++v) mapping[v] = y0 + v;
    objective_terms.push_back(remap_variables(blk.objective, mapping));
    for (const auto& g : blk.constraints) out.constraints.push_back(remap_variables(g, mapping));
  }
  out.objective = sum(std::move(objective_terms));

  out.linear_rows.resize(static_cast<std::size_t>(m.num_rows));
  for (int r = 0; r < m.num_rows; ++r) {
    out.linear_rows[r].sense = Sense::Ge;
    out.linear_rows[r].rhs = m.b[r];
  }
  for (const auto& e : m.a) out.linear_rows[e.row].terms.emplace_back(e.col, e.value);
  for (std::size_t i = 0; i < m.blocks.size(); ++i) {
    for (const auto& e : m.blocks[i].linking) {
      out.linear_rows[e.row].terms.emplace_back(out.y_offset[i] + e.col, e.value);
    }
  }
  if (m.nonanticipativity) {
    for (std::size_t i = 1; i < m.blocks.size(); ++i) {
      for (int j = 0; j < m.blocks[i].num_y(); ++j) {
        LinearRow row;
        row.sense = Sense::Eq;
        row.terms = {{out.y_offset[0] + j, 1.0}, {out.y_offset[i] + j, -1.0}};
        out.linear_rows.push_back(std::move(row));
        ++out.num_nonanticipativity_rows;
      }
    }
  }
  return out;
}

}  // namespace bnp
