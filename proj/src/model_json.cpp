#include "bnp/model_json.hpp"

#include <cmath>
#include <string>

#include "json.hpp"

namespace bnp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ModelError("instance json: " + what); }

json expr_json(const Expr& e, int num_y) {
  switch (e.kind()) {
    case ExprKind::Constant: return json::array({"const", e.value()});
    case ExprKind::Variable: {
      const int i = e.var_index();
      return json::array({"var", i < num_y ? "y" + std::to_string(i) : "z" + std::to_string(i - num_y)});
    }
    default: break;
  }
  json out = json::array({kind_name(e.kind())});
  for (const auto& c : e.children()) out.push_back(expr_json(c, num_y));
  if (e.kind() == ExprKind::Powi) out.push_back(e.exponent());
  return out;
}

Expr parse_expr(const json& j, int num_y) {
  if (!j.is_array() || j.empty() || !j[0].is_string()) fail("expression must be a prefix array");
  const std::string op = j[0].get<std::string>();
  if (op == "const") {
    if (j.size() != 2 || !j[1].is_number()) fail("const takes one number");
    return Expr::constant(j[1].get<double>());
  }
  if (op == "var") {
    if (j.size() != 2 || !j[1].is_string()) fail("var takes one name");
    const std::string name = j[1].get<std::string>();
    if (name.size() < 2 || (name[0] != 'y' && name[0] != 'z')) fail("bad variable name '" + name + "'");
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(name.substr(1), &used);
      if (used != name.size() - 1 || k < 0) fail("bad variable name '" + name + "'");
    } catch (const std::logic_error&) {
      fail("bad variable name '" + name + "'");
    }
    if (name[0] == 'y' && k >= num_y) fail("variable '" + name + "' outside the block's y range");
    return Expr::variable(name[0] == 'y' ? k : num_y + k);
  }
  static const std::pair<const char*, ExprKind> kinds[] = {
      {"add", ExprKind::Add}, {"sub", ExprKind::Sub},   {"mul", ExprKind::Mul},   {"div", ExprKind::Div},
      {"neg", ExprKind::Neg}, {"sqr", ExprKind::Sqr},   {"sqrt", ExprKind::Sqrt}, {"powi", ExprKind::Powi},
      {"exp", ExprKind::Exp}, {"log", ExprKind::Log}};
  for (const auto& [name, kind] : kinds) {
    if (op != name) continue;
    std::vector<Expr> children;
    std::size_t end = j.size();
    int exponent = 0;
    if (kind == ExprKind::Powi) {
      if (j.size() != 3 || !j[2].is_number_integer()) fail("powi takes an expression and an integer");
      exponent = j[2].get<int>();
      end = 2;
    }
    for (std::size_t a = 1; a < end; ++a) children.push_back(parse_expr(j[a], num_y));
    try {
      return Expr::make(kind, std::move(children), exponent);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  fail("unknown operator '" + op + "'");
}

json triples(const std::vector<SparseEntry>& es) {
  json out = json::array();
  for (const auto& e : es) out.push_back(json::array({e.row, e.col, e.value}));
  return out;
}

std::vector<SparseEntry> parse_triples(const json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + " must be an array of [row, col, value]");
  std::vector<SparseEntry> out;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
        !t[2].is_number()) {
      fail(std::string(what) + " entries must be [row, col, value]");
    }
    out.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
  }
  return out;
}

const char* kind_str(VarKind k) { return k == VarKind::Integer ? "integer" : "continuous"; }

VarKind parse_kind(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "integer") return VarKind::Integer;
  if (s == "continuous") return VarKind::Continuous;
  fail("kind must be 'continuous' or 'integer'");
}

template <class T>
T need(const json& obj, const char* key) {
  if (!obj.contains(key)) fail(std::string("missing key '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(std::string("key '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string expr_to_json(const Expr& expr, int num_y) { return expr_json(expr, num_y).dump(); }

Expr expr_from_json(std::string_view text, int num_y) {
  try {
    return parse_expr(json::parse(text), num_y);
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

std::string model_to_json(const StructuredModel& m, int indent) {
  json out;
  out["name"] = m.name;
  out["nonanticipativity"] = m.nonanticipativity;
  out["x"] = json::array();
  for (const auto& x : m.x) {
    out["x"].push_back({{"kind", kind_str(x.kind)}, {"hi", std::isinf(x.hi) ? json(nullptr) : json(x.hi)}});
  }
  out["c"] = m.c;
  out["rows"] = m.num_rows;
  out["A"] = triples(m.a);
  out["b"] = m.b;
  out["blocks"] = json::array();
  for (const auto& b : m.blocks) {
    json jb;
    jb["id"] = b.id;
    jb["y"] = json::array();
    for (int j = 0; j < b.num_y(); ++j) jb["y"].push_back({{"lo", b.y_lo[j]}, {"hi", b.y_hi[j]}});
    jb["z"] = json::array();
    for (const auto& z : b.z) {
      json jz = {{"lo", z.lo}, {"hi", z.hi}, {"kind", kind_str(z.kind)}};
      if (z.closed_form) jz["closed_form"] = expr_json(*z.closed_form, b.num_y());
      jb["z"].push_back(std::move(jz));
    }
    jb["objective"] = expr_json(b.objective, b.num_y());
    jb["constraints"] = json::array();
    for (const auto& g : b.constraints) jb["constraints"].push_back(expr_json(g, b.num_y()));
    jb["D_rows"] = b.linking_rows;
    jb["D"] = triples(b.linking);
    jb["convexity"] = b.convexity == Convexity::Equality ? "equality" : "at-most-one";
    jb["entity_weights"] = b.entity_weights;
    jb["monotone"] = b.monotone;
    out["blocks"].push_back(std::move(jb));
  }
  out["initial_columns"] = json::array();
  for (const auto& ic : m.initial_columns) {
    out["initial_columns"].push_back({{"block", ic.block}, {"design", ic.design}, {"cost", ic.cost}});
  }
  return out.dump(indent) + "\n";
}

namespace {

StructuredModel read_model(const json& j) {
  if (!j.is_object()) fail("top level must be an object");
  StructuredModel m;
  m.name = j.value("name", std::string());
  m.nonanticipativity = j.value("nonanticipativity", false);
  for (const auto& x : need<json>(j, "x")) {
    XVar v;
    v.kind = parse_kind(need<json>(x, "kind"));
    if (x.contains("hi") && !x["hi"].is_null()) v.hi = need<double>(x, "hi");
    m.x.push_back(v);
  }
  m.c = need<std::vector<double>>(j, "c");
  m.num_rows = need<int>(j, "rows");
  m.a = parse_triples(need<json>(j, "A"), "A");
  m.b = need<std::vector<double>>(j, "b");
  int index = 0;
  for (const auto& jb : need<json>(j, "blocks")) {
    Block b;
    b.id = jb.value("id", index++);
    for (const auto& y : need<json>(jb, "y")) {
      b.y_lo.push_back(need<std::int64_t>(y, "lo"));
      b.y_hi.push_back(need<std::int64_t>(y, "hi"));
    }
    const int p = b.num_y();
    if (jb.contains("z")) {
      for (const auto& z : jb["z"]) {
        ZVar v;
        v.lo = need<double>(z, "lo");
        v.hi = need<double>(z, "hi");
        v.kind = z.contains("kind") ? parse_kind(z["kind"]) : VarKind::Continuous;
        if (z.contains("closed_form")) v.closed_form = parse_expr(z["closed_form"], p);
        b.z.push_back(std::move(v));
      }
    }
    b.objective = parse_expr(need<json>(jb, "objective"), p);
    if (jb.contains("constraints")) {
      for (const auto& g : jb["constraints"]) b.constraints.push_back(parse_expr(g, p));
    }
    b.linking = jb.contains("D") ? parse_triples(jb["D"], "D") : std::vector<SparseEntry>{};
    b.linking_rows = jb.contains("D_rows") ? need<int>(jb, "D_rows") : m.num_rows;
    const std::string conv = jb.value("convexity", std::string("equality"));
    if (conv == "equality") {
      b.convexity = Convexity::Equality;
    } else if (conv == "at-most-one") {
      b.convexity = Convexity::AtMostOne;
    } else {
      fail("convexity must be 'equality' or 'at-most-one'");
    }
    if (jb.contains("entity_weights")) b.entity_weights = need<std::vector<double>>(jb, "entity_weights");
    b.monotone = jb.value("monotone", false);
    m.blocks.push_back(std::move(b));
  }
  if (j.contains("initial_columns")) {
    for (const auto& ic : j["initial_columns"]) {
      m.initial_columns.push_back(
          {need<int>(ic, "block"), need<Design>(ic, "design"), need<double>(ic, "cost")});
    }
  }
  return m;
}

}  // namespace

StructuredModel model_from_json(std::string_view text) {
  try {
    return read_model(json::parse(text));
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

}  // namespace bnp
