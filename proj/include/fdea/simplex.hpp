#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fdea/error.hpp"
#include "fdea/model.hpp"

namespace fdea {

struct LpRow {
  std::vector<double> coeffs;
  Relation relation;
  double rhs;
};

/// minimize objective . x + objective_constant
/// subject to rows, x_j >= lower_j.
struct LinearProgram {
  std::string name;
  std::vector<double> objective;
  double objective_constant = 0.0;
  std::vector<LpRow> rows;
  std::vector<double> lower;

  std::size_t num_variables() const noexcept { return objective.size(); }

  void validate() const {
    const std::size_t n = objective.size();
    if (lower.size() != n) throw ValidationError(name + ": bound vector size mismatch");
    for (double lb : lower) {
      if (!std::isfinite(lb)) throw ValidationError(name + ": non-finite lower bound");
    }
    for (const auto& r : rows) {
      if (r.coeffs.size() != n) throw ValidationError(name + ": row width mismatch");
      if (!std::isfinite(r.rhs)) throw ValidationError(name + ": non-finite right-hand side");
    }
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> x;
  std::size_t iterations = 0;
  /// Largest row violation at x, relative to the row magnitude.
  double max_violation = 0.0;
};

struct SimplexOptions {
  /// Reduced-cost and phase-1 feasibility tolerance on the equilibrated problem.
  double tol = 1e-9;
  /// Smallest admissible pivot magnitude.
  double pivot_tol = 1e-11;
  /// 0 selects 50 * (rows + columns) + 1000.
  std::size_t max_iterations = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after = 20;
};

namespace detail {

/// Dense tableau for min c.x, A x = b, x >= 0 with b >= 0. The last row holds
/// reduced costs; its last entry holds minus the objective value.
class Tableau {
public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0),
        blocked_(cols, false) {}

  double& at(std::size_t r, std::size_t c) { return cells_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return cells_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  double cost(std::size_t c) const { return at(rows_, c); }
  double value() const { return -at(rows_, cols_); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::vector<std::size_t>& basis() noexcept { return basis_; }
  const std::vector<std::size_t>& basis() const noexcept { return basis_; }
  void block(std::size_t c) { blocked_[c] = true; }

  /// Installs cost vector c and prices out the current basis.
  void set_costs(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= cols_; ++j) at(rows_, j) = j < cols_ ? c[j] : 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(rows_, j) -= cb * at(r, j);
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t j = 0; j <= cols_; ++j) at(pr, j) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(r, j) -= f * at(pr, j);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  enum class Outcome { kOptimal, kUnbounded };

  Outcome run(const SimplexOptions& opt, std::size_t& iterations, std::size_t limit,
              const std::string& name) {
    std::size_t degenerate = 0;
    for (;;) {
      const bool bland = degenerate >= opt.bland_after;
      std::size_t enter = cols_;
      double best = -opt.tol;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (blocked_[j]) continue;
        const double rc = cost(j);
        if (rc < best) {
          enter = j;
          best = rc;
          if (bland) break;
        }
      }
      if (enter == cols_) return Outcome::kOptimal;

      std::size_t leave = rows_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= opt.pivot_tol) continue;
        const double q = std::max(rhs(r), 0.0) / a;
        if (leave == rows_) {
          ratio = q;
          leave = r;
          continue;
        }
        const bool tie = std::abs(q - ratio) <= 1e-12 * (1.0 + ratio);
        if (q < ratio && !tie) {
          ratio = q;
          leave = r;
        } else if (tie && basis_[r] < basis_[leave]) {
          leave = r;
        }
      }
      if (leave == rows_) return Outcome::kUnbounded;

      if (++iterations > limit) {
        throw SolverError("simplex iteration limit (" + std::to_string(limit) +
                          ") exceeded on " + name);
      }
      degenerate = ratio <= opt.tol ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
  std::vector<bool> blocked_;
};

inline double relative_violation(const LpRow& row, const std::vector<double>& x) {
  double lhs = 0.0;
  double mag = std::max(1.0, std::abs(row.rhs));
  for (std::size_t j = 0; j < x.size(); ++j) {
    lhs += row.coeffs[j] * x[j];
    mag = std::max(mag, std::abs(row.coeffs[j] * x[j]));
  }
  double excess = 0.0;
  switch (row.relation) {
    case Relation::kLessEqual: excess = std::max(0.0, lhs - row.rhs); break;
    case Relation::kGreaterEqual: excess = std::max(0.0, row.rhs - lhs); break;
    case Relation::kEqual: excess = std::abs(lhs - row.rhs); break;
  }
  return excess / mag;
}

}  // namespace detail

/// Solves the LP with a two-phase dense primal simplex.
///
/// Variables are shifted to their lower bounds, then rows and columns are
/// equilibrated so every nonzero magnitude is at most one. Pricing is
/// Dantzig's most-negative reduced cost; after `bland_after` consecutive
/// degenerate pivots it switches to Bland's smallest-index rule. Ties in the
/// ratio test go to the smallest basic column. The result is deterministic.
inline LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {}) {
  lp.validate();
  const std::size_t n = lp.num_variables();
  const std::size_t m = lp.rows.size();

  // Shift x = lower + x', then equilibrate rows and columns.
  std::vector<std::vector<double>> a(m, std::vector<double>(n));
  std::vector<double> b(m);
  std::vector<Relation> rel(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    double shifted = row.rhs;
    for (std::size_t j = 0; j < n; ++j) shifted -= row.coeffs[j] * lp.lower[j];
    double scale = 0.0;
    for (double v : row.coeffs) scale = std::max(scale, std::abs(v));
    rel[i] = row.relation;
    if (scale == 0.0) {
      const bool ok = (rel[i] == Relation::kLessEqual && shifted >= -opt.tol) ||
                      (rel[i] == Relation::kGreaterEqual && shifted <= opt.tol) ||
                      (rel[i] == Relation::kEqual && std::abs(shifted) <= opt.tol);
      if (!ok) return {LpStatus::kInfeasible, std::numeric_limits<double>::quiet_NaN(), {}, 0, 0.0};
      scale = 1.0;
    }
    for (std::size_t j = 0; j < n; ++j) a[i][j] = row.coeffs[j] / scale;
    b[i] = shifted / scale;
  }
  std::vector<double> col_scale(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s = std::max(s, std::abs(a[i][j]));
    if (s > 0.0) {
      col_scale[j] = 1.0 / s;
      for (std::size_t i = 0; i < m; ++i) a[i][j] *= col_scale[j];
    }
  }
  std::vector<double> cost(n);
  double cost_scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = lp.objective[j] * col_scale[j];
    cost_scale = std::max(cost_scale, std::abs(cost[j]));
  }
  if (cost_scale > 0.0) {
    for (double& c : cost) c /= cost_scale;
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      b[i] = -b[i];
      for (double& v : a[i]) v = -v;
      if (rel[i] == Relation::kLessEqual) {
        rel[i] = Relation::kGreaterEqual;
      } else if (rel[i] == Relation::kGreaterEqual) {
        rel[i] = Relation::kLessEqual;
      }
    }
  }

  // Columns: structural, one slack/surplus per inequality, one artificial per >= or = row.
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (auto r : rel) {
    if (r != Relation::kEqual) ++n_slack;
    if (r != Relation::kLessEqual) ++n_art;
  }
  const std::size_t cols = n + n_slack + n_art;
  detail::Tableau t(m, cols);
  std::vector<bool> artificial(cols, false);
  std::size_t next_slack = n;
  std::size_t next_art = n + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = a[i][j];
    t.rhs(i) = b[i];
    if (rel[i] == Relation::kLessEqual) {
      t.at(i, next_slack) = 1.0;
      t.basis()[i] = next_slack++;
    } else {
      if (rel[i] == Relation::kGreaterEqual) t.at(i, next_slack++) = -1.0;
      t.at(i, next_art) = 1.0;
      artificial[next_art] = true;
      t.basis()[i] = next_art++;
    }
  }

  const std::size_t limit =
      opt.max_iterations ? opt.max_iterations : 50 * (m + cols) + 1000;
  LpSolution sol;

  if (n_art > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) phase1[j] = artificial[j] ? 1.0 : 0.0;
    t.set_costs(phase1);
    t.run(opt, sol.iterations, limit, lp.name + " (phase 1)");
    if (t.value() > opt.tol * std::max<std::size_t>(1, m)) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    // Drive zero-valued artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!artificial[t.basis()[i]]) continue;
      std::size_t best = cols;
      double mag = opt.pivot_tol;
      for (std::size_t j = 0; j < cols; ++j) {
        if (artificial[j]) continue;
        if (std::abs(t.at(i, j)) > mag) {
          mag = std::abs(t.at(i, j));
          best = j;
        }
      }
      if (best != cols) t.pivot(i, best);
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (artificial[j]) t.block(j);
    }
  }

  std::vector<double> phase2(cols, 0.0);
  std::copy(cost.begin(), cost.end(), phase2.begin());
  t.set_costs(phase2);
  if (t.run(opt, sol.iterations, limit, lp.name) == detail::Tableau::Outcome::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }

  sol.status = LpStatus::kOptimal;
  std::vector<double> scaled(cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) scaled[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  sol.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) sol.x[j] = lp.lower[j] + col_scale[j] * scaled[j];

  sol.objective = lp.objective_constant;
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.x[j];
  for (const auto& row : lp.rows) {
    sol.max_violation = std::max(sol.max_violation, detail::relative_violation(row, sol.x));
  }
  return sol;
}

inline LpSolution solve_lp(const LinearProgram& lp, double tol) {
  SimplexOptions opt;
  opt.tol = tol;
  return solve_lp(lp, opt);
}

}  // namespace fdea
