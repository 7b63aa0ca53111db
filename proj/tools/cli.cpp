#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "bnp/bnp.hpp"
#include "bnp/model_json.hpp"
#include "bnp/oracles.hpp"
#include "bnp/problems.hpp"
#include "json.hpp"

namespace bnp::cli {

using nlohmann::json;

namespace {

struct RunConfig {
  std::string method = "bnp";
  double gap = 1e-3;
  double time_limit = 600.0;
  long pricing_budget = 500;
  int workers = 1;
  std::uint64_t seed = 0;
  std::string rule = "most-fractional";
  std::string instance;
  std::string out;
  std::string tree_log;
  std::string colgen_log;
};

struct GenerateConfig {
  std::string kind;
  std::uint64_t seed = 0;
  int circles = 3;
  int rectangles = 3;
  std::string out;
};

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void add_run_options(CLI::App& app, RunConfig& c) {
  app.add_option("instance", c.instance, "Instance JSON file")->required();
  app.add_option("--method", c.method, "bnp | fullspace-oracle | enumerate-columns")
      ->envname("BNP_METHOD")
      ->check(CLI::IsMember({"bnp", "fullspace-oracle", "enumerate-columns"}));
  app.add_option("--gap", c.gap, "Relative optimality gap")
      ->envname("BNP_GAP")
      ->check(CLI::Validator(
          [](std::string& s) {
            try {
              return std::stod(s) > 0.0 ? std::string() : std::string("gap must be positive");
            } catch (const std::exception&) {
              return std::string("gap must be a number");
            }
          },
          "POSITIVE"));
  app.add_option("--time-limit", c.time_limit, "Time limit in seconds")
      ->envname("BNP_TIME_LIMIT")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--pricing-budget", c.pricing_budget, "Node budget of budget-mode pricing")
      ->envname("BNP_PRICING_BUDGET")
      ->check(CLI::PositiveNumber);
  app.add_option("--workers", c.workers, "Concurrent pricing workers")
      ->envname("BNP_WORKERS")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Recorded in the report")->envname("BNP_SEED");
  app.add_option("--rule", c.rule, "most-fractional | largest-entity-first")
      ->envname("BNP_RULE")
      ->check(CLI::IsMember({"most-fractional", "largest-entity-first"}));
  app.add_option("--out", c.out, "Report JSON path")->envname("BNP_OUT");
  app.add_option("--tree-log", c.tree_log, "Tree log CSV path");
  app.add_option("--colgen-log", c.colgen_log, "Column generation log CSV path");
}

std::optional<ValidatedModel> load(const std::string& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot read " << path << "\n";
    return std::nullopt;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  StructuredModel m;
  try {
    m = model_from_json(ss.str());
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return std::nullopt;
  }
  auto v = validate_model(std::move(m));
  if (!v.ok()) {
    for (const auto& e : v.errors) err << "invalid: " << e << "\n";
    return std::nullopt;
  }
  return *v.model;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path);
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  f << text;
  return true;
}

json solution_json(const Incumbent& inc) {
  json blocks = json::array();
  for (const auto& b : inc.blocks) {
    blocks.push_back({{"empty", b.empty}, {"y", b.y}, {"z", b.z}, {"cost", b.cost}});
  }
  return {{"x", inc.x}, {"blocks", blocks}};
}

json run_bnp(const ValidatedModel& vm, const RunConfig& c, std::ostream& err) {
  BnpOptions o;
  o.gap = c.gap;
  o.time_limit_s = c.time_limit;
  o.rule = c.rule == "largest-entity-first" ? BranchRule::LargestEntityFirst : BranchRule::MostFractional;
  o.colgen.workers = c.workers;
  o.colgen.pricing.node_budget = c.pricing_budget;
  const BnpResult r = solve_bnp(vm, o);
  json rep = {{"status", status_name(r.status)},
              {"objective", r.incumbent ? num(r.ub) : json(nullptr)},
              {"lb", num(r.lb)},
              {"ub", num(r.ub)},
              {"gap", num(r.gap())},
              {"nodes", r.nodes},
              {"max_depth", r.max_depth},
              {"colgen_iterations", r.colgen_iterations},
              {"columns_generated", r.columns_generated},
              {"pool_size", r.pool_size},
              {"pricing_calls", r.pricing_calls},
              {"infeasible_columns", r.infeasible_columns.size()},
              {"root_lb", num(r.root_lb)},
              {"root_fractional", r.root_fractional},
              {"branching_exercised", r.nodes > 1},
              {"wallclock_ms", r.wallclock_ms}};
  if (r.incumbent) rep["solution"] = solution_json(*r.incumbent);
  if (!c.tree_log.empty()) write_file(c.tree_log, tree_log_csv(r.tree), err);
  if (!c.colgen_log.empty()) write_file(c.colgen_log, colgen_log_csv(r.colgen_trace), err);
  return rep;
}

json oracle_json(const OracleResult& r) {
  json rep = {{"status", status_name(r.status)},
              {"objective", r.status == OracleStatus::Refused ? json(nullptr) : num(r.objective)},
              {"lb", num(r.lower)},
              {"ub", num(r.objective)},
              {"nodes", r.nodes},
              {"wallclock_ms", r.wallclock_ms}};
  double gap = kInf;
  if (std::isfinite(r.objective) && std::isfinite(r.lower)) {
    gap = std::max(0.0, r.objective - r.lower) / std::max(std::abs(r.objective), 1e-10);
  }
  rep["gap"] = num(gap);
  if (r.columns > 0) rep["columns_generated"] = r.columns;
  if (!r.reason.empty()) rep["reason"] = r.reason;
  return rep;
}

json run_method(const std::string& method, const ValidatedModel& vm, const RunConfig& c, std::ostream& err) {
  json rep;
  if (method == "bnp") {
    rep = run_bnp(vm, c, err);
  } else if (method == "fullspace-oracle") {
    // The oracle's gap is absolute-plus-relative; a tenth of eps keeps it inside the comparison tolerance.
    GlobalOptions g;
    g.gap = c.gap / 10.0;
    rep = oracle_json(solve_fullspace(vm, g, c.time_limit));
  } else {
    EnumerateOptions e;
    e.time_limit_s = c.time_limit;
    rep = oracle_json(enumerate_columns(vm, e));
  }
  rep["method"] = method;
  return rep;
}

json config_json(const RunConfig& c, const ValidatedModel& vm) {
  return {{"instance", c.instance}, {"name", vm->name},      {"gap", c.gap},
          {"time_limit", c.time_limit}, {"pricing_budget", c.pricing_budget}, {"workers", c.workers},
          {"seed", c.seed},             {"rule", c.rule}};
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto vm = load(c.instance, err);
  if (!vm) return kBadInstance;
  json rep = run_method(c.method, *vm, c, err);
  rep["config"] = config_json(c, *vm);
  const std::string text = rep.dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
  } else if (!write_file(c.out, text, err)) {
    return kBadInstance;
  }
  const std::string status = rep["status"].get<std::string>();
  if (status == "refused") err << "refused: " << rep.value("reason", std::string()) << "\n";
  return exit_code_for_status(status);
}

std::string cell(const json& v, int width, int precision = 10) {
  std::ostringstream s;
  if (v.is_number()) {
    s << std::setprecision(precision) << v.get<double>();
  } else if (v.is_null()) {
    s << "-";
  } else if (v.is_string()) {
    s << v.get<std::string>();
  } else {
    s << v.dump();
  }
  std::string t = s.str();
  if (static_cast<int>(t.size()) < width) t.append(static_cast<std::size_t>(width) - t.size(), ' ');
  return t;
}

int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto vm = load(c.instance, err);
  if (!vm) return kBadInstance;
  json rows = json::array();
  for (const char* m : {"bnp", "fullspace-oracle", "enumerate-columns"}) rows.push_back(run_method(m, *vm, c, err));

  out << cell("method", 20) << cell("status", 12) << cell("objective", 20) << cell("gap", 14) << "time_ms\n";
  for (const auto& r : rows) {
    out << cell(r["method"], 20) << cell(r["status"], 12) << cell(r["objective"], 20) << cell(r["gap"], 14, 4)
        << cell(r["wallclock_ms"], 0, 6) << "\n";
    if (r.contains("reason")) out << "  " << r["method"].get<std::string>() << ": " << r["reason"].get<std::string>() << "\n";
  }
  std::vector<double> objs;
  for (const auto& r : rows) {
    if (r["status"] == "optimal" && r["objective"].is_number()) objs.push_back(r["objective"].get<double>());
  }
  bool consistent = !objs.empty();
  for (double a : objs) {
    for (double b : objs) {
      if (std::abs(a - b) > c.gap * std::max(std::abs(a), std::abs(b)) + 1e-9) consistent = false;
    }
  }
  const bool branched = rows[0].value("branching_exercised", false);
  out << "consistent: " << (consistent ? "true" : "false") << " (" << objs.size() << " methods solved)\n";
  out << "branching exercised: " << (branched ? "true" : "false") << "\n";
  if (!c.out.empty()) {
    json rep = {{"config", config_json(c, *vm)},
                {"methods", rows},
                {"consistent", consistent},
                {"branching_exercised", branched}};
    if (!write_file(c.out, rep.dump(2) + "\n", err)) return kBadInstance;
  }
  return consistent ? kSolved : kInconsistent;
}

int cmd_generate(const GenerateConfig& g, std::ostream& out, std::ostream& err) {
  StructuredModel m;
  if (g.kind == "circle") {
    m = encode_circle_cutting(gen_circle_cutting(g.seed, g.circles, g.rectangles));
  } else if (g.kind == "shared-design") {
    m = encode_shared_design(default_shared_design());
  } else if (g.kind == "adversary") {
    m = gen_branching_adversary(g.seed);
  } else {
    m = gen_random_integer(g.seed);
  }
  const std::string text = model_to_json(m);
  if (g.out.empty()) {
    out << text;
    return kSolved;
  }
  return write_file(g.out, text, err) ? kSolved : kBadInstance;
}

}  // namespace

int exit_code_for_status(const std::string& status) {
  if (status == "optimal") return kSolved;
  if (status == "limit") return kLimit;
  if (status == "infeasible") return kInfeasible;
  return kBadInstance;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Branch-and-price for block-structured nonconvex MINLPs", "bnpsolve"};
  app.require_subcommand(1);

  GenerateConfig gen;
  auto* g = app.add_subcommand("generate", "Write a generated instance as JSON");
  g->add_option("kind", gen.kind, "circle | shared-design | adversary | random-integer")
      ->required()
      ->check(CLI::IsMember({"circle", "shared-design", "adversary", "random-integer"}));
  g->add_option("--seed", gen.seed, "Generator seed")->envname("BNP_SEED");
  g->add_option("--circles", gen.circles, "Max circles (circle kind)")->check(CLI::Range(1, 8));
  g->add_option("--rectangles", gen.rectangles, "Max rectangles (circle kind)")->check(CLI::Range(1, 8));
  g->add_option("--out", gen.out, "Output path (default stdout)")->envname("BNP_OUT");

  RunConfig solve_cfg, compare_cfg;
  auto* s = app.add_subcommand("solve", "Solve an instance and write a JSON report");
  add_run_options(*s, solve_cfg);
  auto* c = app.add_subcommand("compare", "Run branch-and-price and both oracles side by side");
  add_run_options(*c, compare_cfg);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSolved;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInstance;
  }
  try {
    if (g->parsed()) return cmd_generate(gen, out, err);
    if (s->parsed()) return cmd_solve(solve_cfg, out, err);
    return cmd_compare(compare_cfg, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInstance;
  }
}

}  // namespace bnp::cli
