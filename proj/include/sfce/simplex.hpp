#pragma once

// Dense two-phase primal simplex for the LP relaxations. Dantzig pricing
// with a Bland fallback against cycling; explicit failure status instead of
// silent wrong answers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sfce {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status{LpStatus::IterationLimit};
  double objective{0.0};
  std::vector<double> x;  // original variable space
  long iterations{0};
};

enum class RowSense { LessEq, GreaterEq, Equal };

struct LpConstraint {
  std::vector<std::pair<int, double>> terms;
  RowSense sense{RowSense::LessEq};
  double rhs{0.0};
};

/// Minimize c.x subject to the rows and per-variable bounds. Lower bounds
/// must be finite; an infinite upper bound is allowed.
struct LpProblem {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpConstraint> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
};

namespace lp_detail {

inline constexpr double kPivotTol = 1e-9;
inline constexpr double kLpFeasTol = 1e-7;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows * cols, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
  double* row(std::size_t r) { return &a_[r * n_]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = row(pr);
    double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < n_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == pr) continue;
      double f = at(r, pc);
      if (f == 0.0) continue;
      double* rr = row(r);
      for (std::size_t c = 0; c < n_; ++c) rr[c] -= f * prow[c];
      rr[pc] = 0.0;
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<double> a_;
};

}  // namespace lp_detail

inline LpResult solve_lp(const LpProblem& prob, long max_iterations = 200000) {
  using namespace lp_detail;
  const int nv = prob.num_vars();
  const double inf = std::numeric_limits<double>::infinity();

  // Substitute fixed variables, shift the rest to zero lower bounds.
  std::vector<int> packed(nv, -1);
  std::vector<double> fixed_value(nv, 0.0);
  std::vector<bool> is_fixed(nv, false);
  int np = 0;
  for (int j = 0; j < nv; ++j) {
    if (!(prob.lower[j] > -inf)) throw std::invalid_argument("lower bounds must be finite");
    if (prob.upper[j] < prob.lower[j] - kLpFeasTol) {
      LpResult r;
      r.status = LpStatus::Infeasible;
      return r;
    }
    if (prob.upper[j] - prob.lower[j] <= 1e-12) {
      is_fixed[j] = true;
      fixed_value[j] = prob.lower[j];
    } else {
      packed[j] = np++;
    }
  }

  struct StdRow {
    std::vector<std::pair<int, double>> terms;  // packed indices
    RowSense sense;
    double rhs;
  };
  std::vector<StdRow> rows;
  rows.reserve(prob.rows.size() + static_cast<std::size_t>(np));
  for (const auto& r : prob.rows) {
    StdRow sr;
    sr.sense = r.sense;
    sr.rhs = r.rhs;
    for (auto [j, c] : r.terms) {
      if (is_fixed[j]) {
        sr.rhs -= c * fixed_value[j];
      } else {
        sr.rhs -= c * prob.lower[j];
        sr.terms.push_back({packed[j], c});
      }
    }
    // Constant rows: check and drop.
    if (sr.terms.empty()) {
      bool ok = (sr.sense == RowSense::LessEq && sr.rhs >= -kLpFeasTol) ||
                (sr.sense == RowSense::GreaterEq && sr.rhs <= kLpFeasTol) ||
                (sr.sense == RowSense::Equal && std::abs(sr.rhs) <= kLpFeasTol);
      if (!ok) {
        LpResult r2;
        r2.status = LpStatus::Infeasible;
        return r2;
      }
      continue;
    }
    rows.push_back(std::move(sr));
  }
  for (int j = 0; j < nv; ++j) {
    if (is_fixed[j] || prob.upper[j] == inf) continue;
    StdRow sr;
    sr.sense = RowSense::LessEq;
    sr.rhs = prob.upper[j] - prob.lower[j];
    sr.terms = {{packed[j], 1.0}};
    rows.push_back(std::move(sr));
  }

  const std::size_t m = rows.size();
  // Column layout: [structural | slack/surplus | artificial | rhs].
  std::size_t n_slack = 0, n_art = 0;
  for (auto& r : rows) {
    double sign = r.rhs < 0 ? -1.0 : 1.0;
    if (sign < 0) {
      for (auto& t : r.terms) t.second = -t.second;
      r.rhs = -r.rhs;
      if (r.sense == RowSense::LessEq) {
        r.sense = RowSense::GreaterEq;
      } else if (r.sense == RowSense::GreaterEq) {
        r.sense = RowSense::LessEq;
      }
    }
    if (r.sense != RowSense::Equal) ++n_slack;
    if (r.sense != RowSense::LessEq) ++n_art;
  }
  const std::size_t n_struct = static_cast<std::size_t>(np);
  const std::size_t total = n_struct + n_slack + n_art;
  const std::size_t rhs_col = total;

  // Two extra rows: phase-2 cost then phase-1 cost.
  Tableau t(m + 2, total + 1);
  const std::size_t cost_row = m;
  const std::size_t art_row = m + 1;

  std::vector<int> basis(m, -1);
  std::size_t next_slack = n_struct;
  std::size_t next_art = n_struct + n_slack;
  for (std::size_t r = 0; r < m; ++r) {
    for (auto [j, c] : rows[r].terms) t.at(r, static_cast<std::size_t>(j)) += c;
    t.at(r, rhs_col) = rows[r].rhs;
    if (rows[r].sense == RowSense::LessEq) {
      t.at(r, next_slack) = 1.0;
      basis[r] = static_cast<int>(next_slack++);
    } else if (rows[r].sense == RowSense::GreaterEq) {
      t.at(r, next_slack) = -1.0;
      ++next_slack;
      t.at(r, next_art) = 1.0;
      basis[r] = static_cast<int>(next_art++);
    } else {
      t.at(r, next_art) = 1.0;
      basis[r] = static_cast<int>(next_art++);
    }
  }

  for (int j = 0; j < nv; ++j) {
    if (!is_fixed[j]) t.at(cost_row, static_cast<std::size_t>(packed[j])) = prob.objective[j];
  }
  // Phase-1 cost: sum of artificials, expressed in nonbasic terms.
  for (std::size_t c = n_struct + n_slack; c < total; ++c) t.at(art_row, c) = 1.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] >= static_cast<int>(n_struct + n_slack)) {
      double* rr = t.row(r);
      double* ar = t.row(art_row);
      for (std::size_t c = 0; c <= total; ++c) ar[c] -= rr[c];
    }
  }

  LpResult result;
  auto run_phase = [&](std::size_t obj_row, std::size_t col_limit) -> LpStatus {
    long stall = 0;
    double last_obj = inf;
    while (true) {
      if (result.iterations++ > max_iterations) return LpStatus::IterationLimit;
      bool bland = stall > 200;
      // Entering column.
      std::size_t enter = total;
      double best = -kPivotTol;
      double* orow = t.row(obj_row);
      for (std::size_t c = 0; c < col_limit; ++c) {
        double rc = orow[c];
        if (rc < best) {
          if (bland) {
            if (rc < -kPivotTol) {
              enter = c;
              break;
            }
          } else {
            best = rc;
            enter = c;
          }
        }
      }
      if (enter == total) return LpStatus::Optimal;
      // Ratio test; ties broken toward the smallest basis index (Bland).
      std::size_t leave = m;
      double best_ratio = inf;
      for (std::size_t r = 0; r < m; ++r) {
        double a = t.at(r, enter);
        if (a <= kPivotTol) continue;
        double ratio = t.at(r, rhs_col) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave == m || basis[r] < basis[leave]))) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave == m) return LpStatus::Unbounded;
      t.pivot(leave, enter);
      basis[leave] = static_cast<int>(enter);
      double obj = -t.at(obj_row, rhs_col);
      if (obj < last_obj - 1e-12) {
        last_obj = obj;
        stall = 0;
      } else {
        ++stall;
      }
    }
  };

  // Phase 1.
  if (n_art > 0) {
    LpStatus s = run_phase(art_row, total);
    if (s != LpStatus::Optimal) {
      result.status = s == LpStatus::Unbounded ? LpStatus::IterationLimit : s;
      return result;
    }
    if (-t.at(art_row, rhs_col) > 1e-7) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Pivot remaining artificials out of the basis or drop their rows.
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] < static_cast<int>(n_struct + n_slack)) continue;
      std::size_t enter = total;
      for (std::size_t c = 0; c < n_struct + n_slack; ++c) {
        if (std::abs(t.at(r, c)) > kPivotTol) {
          enter = c;
          break;
        }
      }
      if (enter == total) {
        basis[r] = -1;  // redundant row; keep inert (all structural coeffs ~ 0)
        continue;
      }
      t.pivot(r, enter);
      basis[r] = static_cast<int>(enter);
    }
  }

  // Phase 2: price only real columns, artificials stay out.
  LpStatus s = run_phase(cost_row, n_struct + n_slack);
  if (s != LpStatus::Optimal) {
    result.status = s;
    return result;
  }

  result.status = LpStatus::Optimal;
  result.x.assign(nv, 0.0);
  std::vector<double> packed_x(total, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] >= 0) packed_x[static_cast<std::size_t>(basis[r])] = t.at(r, rhs_col);
  }
  double obj = 0;
  for (int j = 0; j < nv; ++j) {
    double v = is_fixed[j] ? fixed_value[j] : prob.lower[j] + packed_x[static_cast<std::size_t>(packed[j])];
    result.x[j] = v;
    obj += prob.objective[j] * v;
  }
  result.objective = obj;
  return result;
}

}  // namespace sfce
