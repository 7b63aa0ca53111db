// Dense bounded-variable revised simplex with an explicit basis inverse.
//
// Every row r gets a slack s_r so that a_r x + s_r = b_r, with s_r in
// [0, inf) for <=, (-inf, 0] for >= and [0, 0] for = rows. Rows whose slack
// cannot absorb the initial residual get an artificial; phase 1 minimizes the
// artificial sum, phase 2 the true objective.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bnp/lp.hpp"

namespace bnp {

const char* status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Limit: return "limit";
  }
  return "?";
}

int LinearProgram::add_column(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  return num_cols() - 1;
}

int LinearProgram::add_row(Sense sense, double rhs_value) {
  senses.push_back(sense);
  rhs.push_back(rhs_value);
  return num_rows() - 1;
}

void LinearProgram::validate() const {
  if (lower.size() != objective.size() || upper.size() != objective.size()) {
    throw std::invalid_argument("LinearProgram: bound vectors do not match column count");
  }
  if (senses.size() != rhs.size()) throw std::invalid_argument("LinearProgram: sense/rhs size mismatch");
  for (int j = 0; j < num_cols(); ++j) {
    if (!(lower[j] <= upper[j])) throw std::invalid_argument("LinearProgram: lower bound exceeds upper bound");
    if (!std::isfinite(objective[j])) throw std::invalid_argument("LinearProgram: non-finite cost");
  }
  for (double r : rhs) {
    if (!std::isfinite(r)) throw std::invalid_argument("LinearProgram: non-finite rhs");
  }
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= num_rows() || e.col < 0 || e.col >= num_cols()) {
      throw std::invalid_argument("LinearProgram: entry out of range");
    }
    if (!std::isfinite(e.value)) throw std::invalid_argument("LinearProgram: non-finite coefficient");
  }
}

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

constexpr double kPivotTol = 1e-11;

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
    m_ = lp.num_rows();
    n_ = lp.num_cols();
    total_ = n_ + 2 * m_;
    cols_.assign(static_cast<std::size_t>(total_), {});
    for (const auto& e : lp.entries) {
      if (e.value != 0.0) cols_[e.col].emplace_back(e.row, e.value);
    }
    lo_.assign(static_cast<std::size_t>(total_), 0.0);
    hi_.assign(static_cast<std::size_t>(total_), 0.0);
    cost_.assign(static_cast<std::size_t>(total_), 0.0);
    x_.assign(static_cast<std::size_t>(total_), 0.0);
    state_.assign(static_cast<std::size_t>(total_), VarState::AtLower);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp.lower[j];
      hi_[j] = lp.upper[j];
    }
    for (int r = 0; r < m_; ++r) {
      const int s = slack(r);
      cols_[s].emplace_back(r, 1.0);
      switch (lp.senses[r]) {
        case Sense::Le: lo_[s] = 0.0; hi_[s] = kInf; break;
        case Sense::Ge: lo_[s] = -kInf; hi_[s] = 0.0; break;
        case Sense::Eq: lo_[s] = 0.0; hi_[s] = 0.0; break;
      }
    }
    basis_.assign(static_cast<std::size_t>(m_), -1);
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  }

  LpSolution run() {
    LpSolution sol;
    initial_basis();
    refactor();

    // Phase 1.
    std::fill(cost_.begin(), cost_.end(), 0.0);
    bool need_phase1 = false;
    for (int r = 0; r < m_; ++r) {
      const int a = artificial(r);
      if (state_[a] == VarState::Basic) {
        cost_[a] = 1.0;
        need_phase1 = true;
      }
    }
    if (need_phase1) {
      const LpStatus st = iterate();
      sol.iterations = iterations_;
      if (st == LpStatus::Limit) {
        sol.status = LpStatus::Limit;
        return sol;
      }
      double infeas = 0.0;
      double scale = 1.0;
      for (int r = 0; r < m_; ++r) {
        infeas += x_[artificial(r)];
        scale = std::max(scale, std::abs(lp_.rhs[r]));
      }
      if (infeas > opt_.feasibility_tol * scale * 10.0) {
        sol.status = LpStatus::Infeasible;
        return sol;
      }
      drive_out_artificials();
    }
    for (int r = 0; r < m_; ++r) {
      const int a = artificial(r);
      lo_[a] = hi_[a] = 0.0;
      x_[a] = 0.0;
      if (state_[a] != VarState::Basic) state_[a] = VarState::AtLower;
    }

    // Phase 2.
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = lp_.objective[j];
    LpStatus st = LpStatus::Optimal;
    for (int round = 0; round < 4; ++round) {
      st = iterate();
      if (st != LpStatus::Optimal) break;
      refactor();
      recompute_basics();
      if (verify()) break;
    }
    sol.iterations = iterations_;
    sol.status = st;
    if (st != LpStatus::Optimal) return sol;

    compute_duals();
    sol.primal.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) sol.primal[j] = clamp_to_bounds(j);
    sol.dual = y_;
    sol.reduced_costs.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) sol.reduced_costs[j] = reduced_cost(j);
    double obj = lp_.objective_offset;
    for (int j = 0; j < n_; ++j) obj += lp_.objective[j] * sol.primal[j];
    sol.objective = obj;
    sol.bound = obj;
    sol.has_point = true;
    return sol;
  }

 private:
  int slack(int r) const { return n_ + r; }
  int artificial(int r) const { return n_ + m_ + r; }

  double clamp_to_bounds(int j) const {
    double v = x_[j];
    if (v < lo_[j]) v = lo_[j];
    if (v > hi_[j]) v = hi_[j];
    return v;
  }

  void initial_basis() {
    for (int j = 0; j < n_ + m_; ++j) {
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        state_[j] = VarState::AtLower;
      } else if (std::isfinite(hi_[j])) {
        x_[j] = hi_[j];
        state_[j] = VarState::AtUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = VarState::FreeZero;
      }
    }
    std::vector<double> residual(lp_.rhs);
    for (int j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (auto [r, v] : cols_[j]) residual[r] -= v * x_[j];
    }
    for (int r = 0; r < m_; ++r) {
      const int s = slack(r);
      const int a = artificial(r);
      const double res = residual[r];
      if (res >= lo_[s] && res <= hi_[s]) {
        basis_[r] = s;
        state_[s] = VarState::Basic;
        x_[s] = res;
        lo_[a] = hi_[a] = 0.0;
        state_[a] = VarState::AtLower;
        x_[a] = 0.0;
        cols_[a] = {{r, 1.0}};
      } else {
        // Slack sits at the bound closest to the residual.
        const double sv = std::clamp(0.0, lo_[s], hi_[s]);
        x_[s] = sv;
        state_[s] = (sv == lo_[s]) ? VarState::AtLower : VarState::AtUpper;
        const double rest = res - sv;
        const double sign = rest >= 0.0 ? 1.0 : -1.0;
        cols_[a] = {{r, sign}};
        lo_[a] = 0.0;
        hi_[a] = kInf;
        basis_[r] = a;
        state_[a] = VarState::Basic;
        x_[a] = std::abs(rest);
      }
    }
  }

  void refactor() {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> b(m * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      for (auto [r, v] : cols_[basis_[k]]) b[static_cast<std::size_t>(r) * m + k] = v;
    }
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      double best = std::abs(b[col * m + col]);
      for (std::size_t r = col + 1; r < m; ++r) {
        if (std::abs(b[r * m + col]) > best) {
          best = std::abs(b[r * m + col]);
          piv = r;
        }
      }
      if (best < 1e-14) throw std::runtime_error("simplex: singular basis");
      if (piv != col) {
        for (std::size_t c = 0; c < m; ++c) {
          std::swap(b[piv * m + c], b[col * m + c]);
          std::swap(binv_[piv * m + c], binv_[col * m + c]);
        }
      }
      const double d = b[col * m + col];
      for (std::size_t c = 0; c < m; ++c) {
        b[col * m + c] /= d;
        binv_[col * m + c] /= d;
      }
      for (std::size_t r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = b[r * m + col];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m; ++c) {
          b[r * m + c] -= f * b[col * m + c];
          binv_[r * m + c] -= f * binv_[col * m + c];
        }
      }
    }
    pivots_since_refactor_ = 0;
  }

  void recompute_basics() {
    std::vector<double> rhs(lp_.rhs);
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
      for (auto [r, v] : cols_[j]) rhs[r] -= v * x_[j];
    }
    const auto m = static_cast<std::size_t>(m_);
    for (std::size_t k = 0; k < m; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += binv_[k * m + i] * rhs[i];
      x_[basis_[k]] = s;
    }
  }

  void compute_duals() {
    const auto m = static_cast<std::size_t>(m_);
    y_.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const double cb = cost_[basis_[k]];
      if (cb == 0.0) continue;
      for (std::size_t i = 0; i < m; ++i) y_[i] += cb * binv_[k * m + i];
    }
  }

  double reduced_cost(int j) const {
    double d = cost_[j];
    for (auto [r, v] : cols_[j]) d -= y_[r] * v;
    return d;
  }

  void column_in_basis_coords(int j, std::vector<double>& alpha) const {
    const auto m = static_cast<std::size_t>(m_);
    alpha.assign(m, 0.0);
    for (auto [r, v] : cols_[j]) {
      for (std::size_t k = 0; k < m; ++k) alpha[k] += binv_[k * m + r] * v;
    }
  }

  double phase_objective() const {
    double s = 0.0;
    for (int j = 0; j < total_; ++j) {
      if (cost_[j] != 0.0) s += cost_[j] * x_[j];
    }
    return s;
  }

  bool fixed(int j) const { return lo_[j] == hi_[j]; }

  // Returns entering variable and direction (+1 increase, -1 decrease), or -1.
  int choose_entering(bool bland, int& dir) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < total_; ++j) {
      const VarState st = state_[j];
      if (st == VarState::Basic || fixed(j)) continue;
      const double d = reduced_cost(j);
      int this_dir = 0;
      if (d < -opt_.optimality_tol && (st == VarState::AtLower || st == VarState::FreeZero)) this_dir = 1;
      if (d > opt_.optimality_tol && (st == VarState::AtUpper || st == VarState::FreeZero)) this_dir = -1;
      if (this_dir == 0) continue;
      if (bland) {
        dir = this_dir;
        return j;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = j;
        dir = this_dir;
      }
    }
    return best;
  }

  LpStatus iterate() {
    const long stall_limit = std::max<long>(10, static_cast<long>(opt_.bland_after_factor) * m_);
    long stall = 0;
    double best_obj = phase_objective();
    std::vector<double> alpha;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::Limit;
      if (pivots_since_refactor_ >= opt_.refactor_every) {
        refactor();
        recompute_basics();
      }
      compute_duals();
      const bool bland = stall >= stall_limit;
      int dir = 0;
      const int enter = choose_entering(bland, dir);
      if (enter < 0) return LpStatus::Optimal;
      ++iterations_;
      column_in_basis_coords(enter, alpha);

      // Ratio test (Harris two-pass unless in Bland mode).
      const double ftol = opt_.feasibility_tol;
      double t_relaxed = kInf;
      if (!bland) {
        for (int k = 0; k < m_; ++k) {
          const double a = dir * alpha[k];
          if (std::abs(a) < kPivotTol) continue;
          const int v = basis_[k];
          if (a > 0.0 && std::isfinite(lo_[v])) t_relaxed = std::min(t_relaxed, (x_[v] - lo_[v] + ftol) / a);
          if (a < 0.0 && std::isfinite(hi_[v])) t_relaxed = std::min(t_relaxed, (hi_[v] - x_[v] + ftol) / -a);
        }
      }
      int leave = -1;
      double t_leave = kInf;
      double best_pivot = 0.0;
      bool leave_to_upper = false;
      for (int k = 0; k < m_; ++k) {
        const double a = dir * alpha[k];
        if (std::abs(a) < kPivotTol) continue;
        const int v = basis_[k];
        double t;
        bool to_upper;
        if (a > 0.0) {
          if (!std::isfinite(lo_[v])) continue;
          t = std::max(0.0, (x_[v] - lo_[v]) / a);
          to_upper = false;
        } else {
          if (!std::isfinite(hi_[v])) continue;
          t = std::max(0.0, (hi_[v] - x_[v]) / -a);
          to_upper = true;
        }
        if (bland) {
          if (t < t_leave || (t == t_leave && leave >= 0 && v < basis_[leave])) {
            t_leave = t;
            leave = k;
            leave_to_upper = to_upper;
          }
        } else if (t <= t_relaxed && std::abs(a) > best_pivot) {
          best_pivot = std::abs(a);
          t_leave = t;
          leave = k;
          leave_to_upper = to_upper;
        }
      }
      const double t_flip = hi_[enter] - lo_[enter];  // inf when either bound is infinite
      if (leave < 0 && !std::isfinite(t_flip)) return LpStatus::Unbounded;

      if (leave < 0 || t_flip <= t_leave) {
        const double t = t_flip;
        for (int k = 0; k < m_; ++k) x_[basis_[k]] -= dir * t * alpha[k];
        if (dir > 0) {
          x_[enter] = hi_[enter];
          state_[enter] = VarState::AtUpper;
        } else {
          x_[enter] = lo_[enter];
          state_[enter] = VarState::AtLower;
        }
      } else {
        const double t = t_leave;
        for (int k = 0; k < m_; ++k) x_[basis_[k]] -= dir * t * alpha[k];
        x_[enter] += dir * t;
        const int out = basis_[leave];
        if (leave_to_upper) {
          x_[out] = hi_[out];
          state_[out] = VarState::AtUpper;
        } else {
          x_[out] = lo_[out];
          state_[out] = VarState::AtLower;
        }
        pivot(leave, enter, alpha);
      }

      const double obj = phase_objective();
      if (obj < best_obj - 1e-12 * (1.0 + std::abs(best_obj))) {
        best_obj = obj;
        stall = 0;
      } else {
        ++stall;
      }
    }
  }

  void pivot(int row, int enter, const std::vector<double>& alpha) {
    const auto m = static_cast<std::size_t>(m_);
    const auto pr = static_cast<std::size_t>(row);
    const double p = alpha[pr];
    for (std::size_t c = 0; c < m; ++c) binv_[pr * m + c] /= p;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == pr || alpha[k] == 0.0) continue;
      const double f = alpha[k];
      for (std::size_t c = 0; c < m; ++c) binv_[k * m + c] -= f * binv_[pr * m + c];
    }
    basis_[pr] = enter;
    state_[enter] = VarState::Basic;
    ++pivots_since_refactor_;
  }

  void drive_out_artificials() {
    std::vector<double> alpha;
    const auto m = static_cast<std::size_t>(m_);
    for (int k = 0; k < m_; ++k) {
      const int v = basis_[k];
      if (v < n_ + m_) continue;
      // Row k of B^{-1} A gives the pivot candidates.
      int best = -1;
      double best_abs = 1e-9;
      for (int j = 0; j < n_ + m_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        double a = 0.0;
        for (auto [r, val] : cols_[j]) a += binv_[static_cast<std::size_t>(k) * m + r] * val;
        if (std::abs(a) > best_abs) {
          best_abs = std::abs(a);
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row; the artificial stays basic at zero
      column_in_basis_coords(best, alpha);
      x_[v] = 0.0;
      state_[v] = VarState::AtLower;
      pivot(k, best, alpha);
    }
    refactor();
    recompute_basics();
  }

  bool verify() {
    const double ftol = 1e-7;
    for (int k = 0; k < m_; ++k) {
      const int v = basis_[k];
      if (x_[v] < lo_[v] - ftol || x_[v] > hi_[v] + ftol) return false;
    }
    compute_duals();
    int dir = 0;
    return choose_entering(false, dir) < 0;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int m_ = 0;
  int n_ = 0;
  int total_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lo_, hi_, cost_, x_, y_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
  std::vector<double> binv_;
  long iterations_ = 0;
  int pivots_since_refactor_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  BoundedSimplex simplex(lp, options);
  return simplex.run();
}

std::string dump_solution(const LinearProgram& lp, const LpSolution& sol) {
  std::ostringstream os;
  os.precision(17);
  os << "status " << status_name(sol.status) << " objective " << sol.objective << " iterations "
     << sol.iterations << '\n';
  for (std::size_t j = 0; j < sol.primal.size(); ++j) {
    os << "x" << j << " = " << sol.primal[j];
    if (j < sol.reduced_costs.size()) os << "  d = " << sol.reduced_costs[j];
    os << '\n';
  }
  for (std::size_t r = 0; r < sol.dual.size(); ++r) {
    os << "row" << r << ' ' << sense_name(lp.senses[r]) << ' ' << lp.rhs[r] << "  dual = " << sol.dual[r] << '\n';
  }
  return os.str();
}

}  // namespace bnp
