#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fdea/config.hpp"
#include "fdea/dataset.hpp"
#include "fdea/error.hpp"
#include "fdea/model.hpp"
#include "fdea/simplex.hpp"

namespace fdea {

/// Charnes-Cooper image of a linear-fractional program.
///
/// With u = t v the program min N(v)/D(v) becomes min N.u + N0 t subject to
/// D.u + D0 t = 1, each a.v (rel) b rewritten as a.u - b t (rel) 0, u >= 0 and
/// t >= t_floor. The scale variable t is appended as the last column; the
/// normalization row is appended as the last row.
inline LinearProgram charnes_cooper(const FractionalProgram& fp, double t_floor) {
  fp.validate();
  if (!(t_floor > 0.0)) throw ValidationError("t_floor must be positive");
  const std::size_t n = fp.num_variables();

  LinearProgram lp;
  lp.name = fp.name();
  lp.objective = fp.numerator.coeffs;
  lp.objective.push_back(fp.numerator.constant);
  lp.lower.assign(n, 0.0);
  lp.lower.push_back(t_floor);

  lp.rows.reserve(fp.constraints.size() + 1);
  for (const auto& c : fp.constraints) {
    LpRow row{c.coeffs, c.relation, 0.0};
    row.coeffs.push_back(-c.rhs);
    lp.rows.push_back(std::move(row));
  }
  LpRow norm{fp.denominator.coeffs, Relation::kEqual, 1.0};
  norm.coeffs.push_back(fp.denominator.constant);
  lp.rows.push_back(std::move(norm));
  return lp;
}

struct FractionalSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  /// Original variables v = u / t.
  std::vector<double> v;
};

/// Charnes-Cooper followed by the simplex; maps the optimum back to v.
inline FractionalSolution solve_fractional(const FractionalProgram& fp, const ModelConfig& cfg) {
  const LinearProgram lp = charnes_cooper(fp, cfg.t_floor);
  SimplexOptions opt;
  opt.tol = cfg.optimality_tol;
  const LpSolution sol = solve_lp(lp, opt);

  FractionalSolution out;
  out.status = sol.status;
  if (sol.status != LpStatus::kOptimal) return out;
  if (sol.max_violation > cfg.feasibility_tol) {
    throw SolverError(fp.name() + ": optimum violates a constraint by " +
                      std::to_string(sol.max_violation));
  }
  const double t = sol.x.back();
  out.objective = sol.objective;
  out.v.resize(fp.num_variables());
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = sol.x[k] / t;
  return out;
}

enum class InstanceStatus { kSolved, kInfeasible };

/// Optimum of one (DMU, alpha) evaluation across all group-switch settings.
struct InstanceResult {
  DmuIndex p = 0;
  double alpha = 0.0;
  InstanceStatus status = InstanceStatus::kInfeasible;
  double overall = std::numeric_limits<double>::quiet_NaN();
  /// Stage-1 score; the single-stage score for black-box evaluations.
  double stage1 = std::numeric_limits<double>::quiet_NaN();
  /// Unused (NaN) for black-box evaluations.
  double stage2 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> theta1, theta2, phi1, phi2;
  /// Intensities indexed by DMU; the evaluated unit's entry is always zero.
  std::vector<double> lambda1, lambda2;
  Group delta1 = Group::kInside;
  Group delta2 = Group::kInside;

  bool solved() const noexcept { return status == InstanceStatus::kSolved; }
};

namespace detail {

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline std::vector<double> extract(const std::vector<double>& v, VarSpan span) {
  return {v.begin() + static_cast<std::ptrdiff_t>(span.offset),
          v.begin() + static_cast<std::ptrdiff_t>(span.offset + span.count)};
}

inline std::vector<double> scatter(const std::vector<double>& v, VarSpan span,
                                   const std::vector<DmuIndex>& peers, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < span.count; ++k) out[peers[k]] = v[span[k]];
  return out;
}

/// Keeps the first strictly better objective; the enumeration order is the tie-break.
inline bool better(const FractionalSolution& cand, const FractionalSolution* best) {
  if (cand.status != LpStatus::kOptimal) return false;
  if (best == nullptr) return true;
  return cand.objective < best->objective - 1e-10 * (1.0 + std::abs(best->objective));
}

}  // namespace detail

/// Evaluates DMU `p` at level `alpha` under the two-stage model: solves the
/// program for (delta1, delta2) in the order (0,0), (0,1), (1,0), (1,1) and
/// keeps the smallest objective.
inline InstanceResult evaluate_dmu(const TwoStageDataset& data, DmuIndex p, double alpha,
                                   const ModelConfig& cfg) {
  static constexpr std::array<std::array<Group, 2>, 4> kOrder = {{
      {Group::kInside, Group::kInside},
      {Group::kInside, Group::kOutside},
      {Group::kOutside, Group::kInside},
      {Group::kOutside, Group::kOutside},
  }};
  InstanceResult res;
  res.p = p;
  res.alpha = alpha;

  FractionalSolution best;
  FractionalProgram best_fp;
  bool found = false;
  for (const auto& [d1, d2] : kOrder) {
    FractionalProgram fp = build_two_stage_program(data, p, alpha, d1, d2, cfg);
    FractionalSolution sol = solve_fractional(fp, cfg);
    if (detail::better(sol, found ? &best : nullptr)) {
      best = std::move(sol);
      best_fp = std::move(fp);
      found = true;
    }
  }
  if (!found) return res;

  const auto& lay = best_fp.layout;
  res.status = InstanceStatus::kSolved;
  res.delta1 = best_fp.info.delta1;
  res.delta2 = best_fp.info.delta2;
  res.overall = best.objective;
  res.theta1 = detail::extract(best.v, lay.theta1);
  res.theta2 = detail::extract(best.v, lay.theta2);
  res.phi1 = detail::extract(best.v, lay.phi1);
  res.phi2 = detail::extract(best.v, lay.phi2);
  res.lambda1 = detail::scatter(best.v, lay.lambda1, lay.peers, data.size());
  res.lambda2 = detail::scatter(best.v, lay.lambda2, lay.peers, data.size());
  res.stage1 = detail::mean(res.theta1) / detail::mean(res.phi1);
  res.stage2 = detail::mean(res.theta2) / detail::mean(res.phi2);
  return res;
}

/// Single-stage counterpart of evaluate_dmu: enumerates delta in {0, 1}.
/// The score is reported in both `overall` and `stage1`.
inline InstanceResult evaluate_blackbox(const TwoStageDataset& data, DmuIndex p, double alpha,
                                        const ModelConfig& cfg) {
  InstanceResult res;
  res.p = p;
  res.alpha = alpha;

  FractionalSolution best;
  FractionalProgram best_fp;
  bool found = false;
  for (Group d : {Group::kInside, Group::kOutside}) {
    FractionalProgram fp = build_blackbox_program(data, p, alpha, d, cfg);
    FractionalSolution sol = solve_fractional(fp, cfg);
    if (detail::better(sol, found ? &best : nullptr)) {
      best = std::move(sol);
      best_fp = std::move(fp);
      found = true;
    }
  }
  if (!found) return res;

  const auto& lay = best_fp.layout;
  res.status = InstanceStatus::kSolved;
  res.delta1 = best_fp.info.delta1;
  res.overall = best.objective;
  res.stage1 = best.objective;
  res.theta1 = detail::extract(best.v, lay.theta1);
  res.phi1 = detail::extract(best.v, lay.phi1);
  res.lambda1 = detail::scatter(best.v, lay.lambda1, lay.peers, data.size());
  return res;
}

}  // namespace fdea
