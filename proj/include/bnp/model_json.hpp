#pragma once

#include <string>
#include <string_view>

#include "bnp/model.hpp"

namespace bnp {

/// JSON instance format.
///
///   {"name": ..., "nonanticipativity": false,
///    "x": [{"kind": "continuous" | "integer", "hi": 40.0 | null}], "c": [...],
///    "rows": m, "A": [[row, col, value], ...], "b": [...],
///    "blocks": [{"id": 0, "y": [{"lo": 0, "hi": 3}],
///                "z": [{"lo": 0.0, "hi": 1.0, "kind": "continuous", "closed_form": EXPR}],
///                "objective": EXPR, "constraints": [EXPR, ...],
///                "D": [[row, col, value], ...], "convexity": "equality" | "at-most-one",
///                "entity_weights": [...], "monotone": false}],
///    "initial_columns": [{"block": 0, "design": [1, 0], "cost": 0.86}]}
///
/// EXPR is a prefix array: ["const", 4.0], ["var", "y0"], ["var", "z1"],
/// ["add", e, e, ...], ["sub", e, e], ["mul", e, e, ...], ["div", e, e],
/// ["neg", e], ["sqr", e], ["sqrt", e], ["powi", e, k], ["exp", e], ["log", e].
/// Variable names are block-local: yJ is y-component J, zK is z-component K.
/// Optional keys may be omitted. Writing then reading reproduces the model
/// exactly, and re-writing gives identical text.
std::string model_to_json(const StructuredModel& model, int indent = 2);

/// Throws ModelError on malformed input. Does not validate; see validate_model.
StructuredModel model_from_json(std::string_view text);

std::string expr_to_json(const Expr& expr, int num_y);
Expr expr_from_json(std::string_view text, int num_y);

}  // namespace bnp
