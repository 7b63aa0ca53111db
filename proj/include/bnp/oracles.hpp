#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "bnp/global.hpp"
#include "bnp/model.hpp"

namespace bnp {

enum class OracleStatus { Optimal, Limit, Infeasible, Refused };

const char* status_name(OracleStatus s);

struct OracleResult {
  OracleStatus status = OracleStatus::Refused;
  double objective = kInf;
  double lower = -kInf;
  /// Flat point (fullspace) or chosen designs per block (enumeration).
  std::vector<double> point;
  std::vector<std::optional<Design>> designs;
  std::string reason;
  long nodes = 0;
  long columns = 0;
  double wallclock_ms = 0.0;
};

/// The undecomposed model as one interval branch-and-bound problem.
/// Refuses models with unbounded x.
GlobalProblem fullspace_problem(const MonolithicMinlp& flat);

OracleResult solve_fullspace(const ValidatedModel& model, GlobalOptions options = {},
                             std::optional<double> time_limit_s = std::nullopt);

struct EnumerateOptions {
  /// Refuse when the blocks' y lattices hold more points than this in total.
  std::int64_t max_designs = 200000;
  std::optional<double> time_limit_s;
};

/// Prices every lattice design of every block exactly, then solves the
/// master MILP over the complete column set. Refuses blocks with continuous
/// z lacking a closed form.
OracleResult enumerate_columns(const ValidatedModel& model, const EnumerateOptions& options = {});

}  // namespace bnp
