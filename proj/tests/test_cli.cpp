#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "bnp/model_json.hpp"
#include "bnp/problems.hpp"
#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bnp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("bnp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_model(const StructuredModel& m, const std::string& name) {
  const auto p = scratch() / name;
  std::ofstream(p) << model_to_json(m);
  return p.string();
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

}  // namespace

TEST_CASE("one circle in a 2x2 square solves at the root") {
  CircleCuttingInstance inst;
  inst.radii = {1.0};
  inst.rectangles = {{2.0, 2.0}};
  const auto path = write_model(encode_circle_cutting(inst), "circle1.json");
  const auto report = (scratch() / "circle1.report.json").string();
  const auto r = run({"solve", path, "--out", report});
  CHECK(r.code == cli::kSolved);
  const json rep = read_json(report);
  CHECK(rep["status"] == "optimal");
  CHECK(rep["nodes"] == 1);
  CHECK(rep["objective"].get<double>() == doctest::Approx(4.0 - std::numbers::pi).epsilon(1e-6));
  for (const char* k : {"lb", "ub", "gap", "colgen_iterations", "columns_generated", "wallclock_ms"}) {
    CHECK(rep.contains(k));
  }
}

TEST_CASE("generate then solve with every method") {
  const auto path = (scratch() / "ri.json").string();
  REQUIRE(run({"generate", "random-integer", "--seed", "17", "--out", path}).code == 0);
  const auto a = run({"solve", path});
  const auto b = run({"solve", path, "--method", "enumerate-columns"});
  const auto c = run({"solve", path, "--method", "fullspace-oracle"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  REQUIRE(c.code == 0);
  const double va = json::parse(a.out)["objective"].get<double>();
  const double vb = json::parse(b.out)["objective"].get<double>();
  const double vc = json::parse(c.out)["objective"].get<double>();
  CHECK(std::abs(va - vb) <= 1e-3 * std::max(1.0, std::abs(vb)));
  CHECK(std::abs(vc - vb) <= 1e-3 * std::max(1.0, std::abs(vb)));
}

TEST_CASE("time limit zero exits with bounds only") {
  const auto path = write_model(gen_random_integer(3), "tl.json");
  const auto r = run({"solve", path, "--time-limit", "0"});
  CHECK(r.code == cli::kLimit);
  const json rep = json::parse(r.out);
  CHECK(rep["status"] == "limit");
  CHECK(rep["lb"].is_null());
}

TEST_CASE("environment overrides apply when the flag is absent") {
  const auto path = write_model(gen_random_integer(4), "env.json");
  ::setenv("BNP_TIME_LIMIT", "0", 1);
  const auto r = run({"solve", path});
  const auto flagged = run({"solve", path, "--time-limit", "60"});
  ::unsetenv("BNP_TIME_LIMIT");
  CHECK(r.code == cli::kLimit);
  CHECK(flagged.code == cli::kSolved);
}

TEST_CASE("malformed and invalid instances exit 4") {
  const auto bad = scratch() / "bad.json";
  std::ofstream(bad) << "{\"x\": [], \"c\": ";
  const auto r = run({"solve", bad.string()});
  CHECK(r.code == cli::kBadInstance);
  CHECK(r.err.find("error") != std::string::npos);

  auto m = gen_random_integer(1);
  m.blocks[0].y_lo[0] = m.blocks[0].y_hi[0] + 1;
  const auto r2 = run({"solve", write_model(m, "invalid.json")});
  CHECK(r2.code == cli::kBadInstance);
  CHECK(r2.err.find("empty y box") != std::string::npos);

  CHECK(run({"solve", (scratch() / "missing.json").string()}).code == cli::kBadInstance);
  CHECK(run({"solve", bad.string(), "--gap", "0"}).code == cli::kBadInstance);
  CHECK(run({"solve", bad.string(), "--workers", "0"}).code == cli::kBadInstance);
}

TEST_CASE("infeasible instance exits 3") {
  auto m = gen_branching_adversary(0);
  m.x[0].hi = 0.0;
  m.blocks[0].y_hi[0] = 1;  // only y = 0 survives y (m - y) <= 0, and the row needs y >= m / 2
  const auto r = run({"solve", write_model(m, "infeasible.json")});
  CHECK(r.code == cli::kInfeasible);
}

TEST_CASE("exit codes depend on the report status alone") {
  CHECK(cli::exit_code_for_status("optimal") == 0);
  CHECK(cli::exit_code_for_status("limit") == 2);
  CHECK(cli::exit_code_for_status("infeasible") == 3);
  CHECK(cli::exit_code_for_status("refused") == 4);
}

TEST_CASE("compare on the adversary reports branching") {
  const auto path = (scratch() / "adv.json").string();
  REQUIRE(run({"generate", "adversary", "--seed", "5", "--out", path}).code == 0);
  const auto r = run({"compare", path});
  CHECK(r.code == 0);
  CHECK(r.out.find("branching exercised: true") != std::string::npos);
  CHECK(r.out.find("consistent: true (3 methods solved)") != std::string::npos);
}

TEST_CASE("compare on circles: enumeration refuses, the others match") {
  const auto path = (scratch() / "circ.json").string();
  REQUIRE(run({"generate", "circle", "--seed", "2", "--out", path}).code == 0);
  const auto report = (scratch() / "circ.compare.json").string();
  const auto r = run({"compare", path, "--out", report});
  CHECK(r.code == 0);
  const json rep = read_json(report);
  CHECK(rep["consistent"] == true);
  CHECK(rep["methods"][2]["status"] == "refused");
  CHECK(rep["methods"][0]["status"] == "optimal");
  CHECK(rep["methods"][1]["status"] == "optimal");
}

TEST_CASE("worker count does not change results") {
  for (const char* kind : {"random-integer", "circle"}) {
    const auto path = (scratch() / (std::string(kind) + "_w.json")).string();
    REQUIRE(run({"generate", kind, "--seed", "8", "--out", path}).code == 0);
    const json a = json::parse(run({"solve", path, "--workers", "1"}).out);
    const json b = json::parse(run({"solve", path, "--workers", "8"}).out);
    for (const char* k : {"objective", "lb", "ub", "nodes", "columns_generated", "pool_size"}) {
      CAPTURE(k);
      CHECK(a[k] == b[k]);
    }
  }
}

TEST_CASE("tree and colgen logs") {
  const auto path = write_model(gen_branching_adversary(1), "logs.json");
  const auto tree = (scratch() / "tree.csv").string();
  const auto cg = (scratch() / "cg.csv").string();
  REQUIRE(run({"solve", path, "--tree-log", tree, "--colgen-log", cg}).code == 0);
  std::ifstream t(tree), g(cg);
  std::string header;
  std::getline(t, header);
  CHECK(header == "node,parent,depth,lb,ub_after,columns_in_pool,status,wallclock_ms");
  std::getline(g, header);
  CHECK(header == "iter,phase1,v_rmp,sum_l,lb,ub,columns_added,mode,wallclock_ms");
}
