#pragma once

// Test fixtures and independent oracles. Nothing here calls the library's
// simplex or Charnes-Cooper code unless a caller passes it in explicitly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fdea/fdea.hpp"

namespace testing {

inline std::string data_path(const std::string& file) { return std::string(FDEA_DATA_DIR) + "/" + file; }

inline const fdea::TwoStageDataset& hamedan() {
  static const fdea::TwoStageDataset data = fdea::parse_dataset(data_path("hamedan_banks.csv"));
  return data;
}

/// Dataset with one measure per block. Each row holds the five triples in
/// block order: x1, y1, z, x2, y2.
inline fdea::TwoStageDataset single_measure_dataset(
    const std::vector<std::array<fdea::TriangularFuzzyNumber, 5>>& rows) {
  std::vector<std::string> names;
  std::array<fdea::MeasureGroup, 5> groups;
  static constexpr const char* kNames[] = {"x1", "y1", "z", "x2", "y2"};
  for (std::size_t b = 0; b < 5; ++b) {
    groups[b].names = {kNames[b]};
    groups[b].values = fdea::FuzzyGrid(rows.size(), 1);
  }
  for (std::size_t j = 0; j < rows.size(); ++j) {
    names.push_back("D" + std::to_string(j + 1));
    for (std::size_t b = 0; b < 5; ++b) groups[b].values(j, 0) = rows[j][b];
  }
  return fdea::TwoStageDataset(std::move(names), std::move(groups));
}

inline fdea::TwoStageDataset crisp_dataset(const std::vector<std::array<double, 5>>& rows) {
  std::vector<std::array<fdea::TriangularFuzzyNumber, 5>> fuzzy;
  for (const auto& r : rows) {
    std::array<fdea::TriangularFuzzyNumber, 5> f;
    for (std::size_t b = 0; b < 5; ++b) f[b] = fdea::TriangularFuzzyNumber::crisp(r[b]);
    fuzzy.push_back(f);
  }
  return single_measure_dataset(fuzzy);
}

/// Random triple with lower in [lo, hi] and spreads of up to 20%.
inline fdea::TriangularFuzzyNumber random_triple(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> base(lo, hi), spread(0.0, 0.2);
  const double l = base(rng);
  const double m = l * (1.0 + spread(rng));
  return {l, m, m * (1.0 + spread(rng))};
}

inline fdea::TwoStageDataset random_dataset(std::mt19937_64& rng, std::size_t n, double lo = 1.0,
                                            double hi = 3.0) {
  std::vector<std::array<fdea::TriangularFuzzyNumber, 5>> rows(n);
  for (auto& r : rows) {
    for (auto& f : r) f = random_triple(rng, lo, hi);
  }
  return single_measure_dataset(rows);
}

// ---------------------------------------------------------------------------
// Dense vertex enumeration for small bounded LPs.

struct VertexResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

namespace detail {

struct Halfspace {
  std::vector<double> a;
  double b;
  bool equality;
};

/// Solves the square system with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a,
                                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    double scale = 0.0;
    for (double v : a[piv]) scale = std::max(scale, std::abs(v));
    if (std::abs(a[piv][c]) <= 1e-12 * std::max(scale, 1e-300)) return std::nullopt;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = b[k] / a[k][k];
  return x;
}

inline bool holds(const Halfspace& h, const std::vector<double>& x, double tol) {
  double s = 0.0, mag = std::abs(h.b);
  for (std::size_t k = 0; k < x.size(); ++k) {
    s += h.a[k] * x[k];
    mag += std::abs(h.a[k] * x[k]);
  }
  const double slack = tol * (1.0 + mag);
  return h.equality ? std::abs(s - h.b) <= slack : s <= h.b + slack;
}

}  // namespace detail

/// Minimum over every basic feasible point. Only valid when the LP is bounded.
inline VertexResult vertex_lp(const fdea::LinearProgram& lp, double tol = 1e-9) {
  const std::size_t n = lp.num_variables();
  std::vector<detail::Halfspace> eqs, ineqs;
  for (const auto& r : lp.rows) {
    switch (r.relation) {
      case fdea::Relation::kEqual:
        eqs.push_back({r.coeffs, r.rhs, true});
        break;
      case fdea::Relation::kLessEqual:
        ineqs.push_back({r.coeffs, r.rhs, false});
        break;
      case fdea::Relation::kGreaterEqual: {
        auto a = r.coeffs;
        for (double& v : a) v = -v;
        ineqs.push_back({a, -r.rhs, false});
        break;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> a(n, 0.0);
    a[k] = -1.0;
    ineqs.push_back({a, -lp.lower[k], false});
  }

  VertexResult best;
  if (eqs.size() > n) return best;
  const std::size_t pick = n - eqs.size();
  if (pick > ineqs.size()) return best;

  std::vector<std::size_t> idx(pick);
  for (std::size_t k = 0; k < pick; ++k) idx[k] = k;
  for (;;) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (const auto& e : eqs) {
      a.push_back(e.a);
      b.push_back(e.b);
    }
    for (std::size_t k : idx) {
      a.push_back(ineqs[k].a);
      b.push_back(ineqs[k].b);
    }
    if (auto x = detail::solve_square(a, b)) {
      bool ok = true;
      for (const auto& h : eqs) ok = ok && detail::holds(h, *x, tol);
      for (const auto& h : ineqs) ok = ok && detail::holds(h, *x, tol);
      if (ok) {
        double obj = lp.objective_constant;
        for (std::size_t k = 0; k < n; ++k) obj += lp.objective[k] * (*x)[k];
        if (!best.feasible || obj < best.objective) best = {true, obj, *x};
      }
    }
    // next combination
    std::size_t k = pick;
    while (k > 0 && idx[k - 1] == ineqs.size() - pick + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t r = k; r < pick; ++r) idx[r] = idx[r - 1] + 1;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Dinkelbach iteration for min N(v)/D(v) with D > 0 on the feasible set.

using LpOracle = std::function<VertexResult(const fdea::LinearProgram&)>;

inline VertexResult vertex_oracle(const fdea::LinearProgram& lp) { return vertex_lp(lp); }

/// Inner solves by the library simplex; used only where vertex enumeration is
/// too large, and the outer parametric loop stays independent of Charnes-Cooper.
inline VertexResult simplex_oracle(const fdea::LinearProgram& lp) {
  const auto s = fdea::solve_lp(lp);
  if (s.status != fdea::LpStatus::kOptimal) return {};
  return {true, s.objective, s.x};
}

/// Feasibility with each row's residual measured against its largest term, so
/// data in raw currency units is judged on the same footing as unit data.
inline bool scaled_feasible(const fdea::FractionalProgram& fp, const std::vector<double>& v,
                            double tol) {
  for (double x : v) {
    if (x < -tol) return false;
  }
  for (const auto& c : fp.constraints) {
    double lhs = 0.0, mag = std::max(1.0, std::abs(c.rhs));
    for (std::size_t k = 0; k < v.size(); ++k) {
      lhs += c.coeffs[k] * v[k];
      mag = std::max(mag, std::abs(c.coeffs[k] * v[k]));
    }
    const double slack = tol * mag;
    const bool ok = c.relation == fdea::Relation::kLessEqual      ? lhs <= c.rhs + slack
                    : c.relation == fdea::Relation::kGreaterEqual ? lhs >= c.rhs - slack
                                                                  : std::abs(lhs - c.rhs) <= slack;
    if (!ok) return false;
  }
  return true;
}

struct DinkelbachResult {
  bool feasible = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v;
  int iterations = 0;
};

inline DinkelbachResult dinkelbach(const fdea::FractionalProgram& fp, const LpOracle& inner,
                                   double tol = 1e-12, int max_iter = 200) {
  fdea::LinearProgram lp;
  lp.name = fp.name() + " [dinkelbach]";
  lp.lower.assign(fp.num_variables(), 0.0);
  for (const auto& c : fp.constraints) lp.rows.push_back({c.coeffs, c.relation, c.rhs});

  const auto parametric = [&](double q) {
    lp.objective.resize(fp.num_variables());
    for (std::size_t k = 0; k < lp.objective.size(); ++k) {
      lp.objective[k] = fp.numerator.coeffs[k] - q * fp.denominator.coeffs[k];
    }
    lp.objective_constant = fp.numerator.constant - q * fp.denominator.constant;
    return inner(lp);
  };

  DinkelbachResult out;
  // Start from the point of largest denominator so the first ratio is finite.
  lp.objective = fp.denominator.coeffs;
  for (double& c : lp.objective) c = -c;
  lp.objective_constant = -fp.denominator.constant;
  auto sol = inner(lp);
  if (!sol.feasible || !(fp.denominator.eval(sol.x) > 0.0)) return out;
  double q = fp.ratio(sol.x);
  for (out.iterations = 1; out.iterations <= max_iter; ++out.iterations) {
    sol = parametric(q);
    const double f = sol.objective;
    const double next = fp.ratio(sol.x);
    if (f >= -tol * (1.0 + std::abs(q)) || next >= q) break;
    q = next;
  }
  out.feasible = true;
  out.value = q;
  out.v = sol.x;
  return out;
}

// ---------------------------------------------------------------------------
// Disjunctive lattice search for tiny two-stage instances (n <= 3, one measure
// per block). The group rule is applied directly, without big-M: for each
// stage either theta <= 1 <= phi or phi <= 1 <= theta.

namespace detail {

struct Interval {
  double lo = 0.0, hi = 1.0;
  bool empty() const { return lo > hi + 1e-12; }
};

/// Restricts s in [0,1] to c0 + c1 * s <= 0.
inline void clip(Interval& iv, double c0, double c1) {
  if (std::abs(c1) < 1e-15) {
    if (c0 > 1e-12) iv.lo = 2.0, iv.hi = 1.0;
    return;
  }
  const double root = -c0 / c1;
  if (c1 > 0.0) {
    iv.hi = std::min(iv.hi, root);
  } else {
    iv.lo = std::max(iv.lo, root);
  }
}

struct StagePoint {
  double theta, phi;
  Interval s;
};

}  // namespace detail

struct LatticeResult {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  std::array<double, 4> point{};  // theta1, phi1, theta2, phi2
};

inline LatticeResult lattice_search(const fdea::TwoStageDataset& data, fdea::DmuIndex p,
                                    double alpha, double w1, double w2, double hi = 3.2,
                                    int coarse = 64) {
  using fdea::MeasureBlock;
  const std::size_t n = data.size();
  std::vector<std::size_t> peers;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != p) peers.push_back(j);
  }
  const auto lo_of = [&](MeasureBlock b, std::size_t j) {
    return fdea::lower_bound(data.values(b)(j, 0), alpha);
  };
  const auto hi_of = [&](MeasureBlock b, std::size_t j) {
    return fdea::upper_bound(data.values(b)(j, 0), alpha);
  };
  // Peer weights (s, 1 - s) for two peers; a single peer has weight 1.
  const std::size_t a = peers[0];
  const std::size_t b = peers.size() > 1 ? peers[1] : peers[0];

  const auto stage = [&](MeasureBlock in, MeasureBlock out, double theta, double phi) {
    detail::Interval iv;
    if (peers.size() == 1) iv = {1.0, 1.0};
    // s*x_a + (1-s)*x_b - theta*x_p <= 0
    const double xa = lo_of(in, a), xb = lo_of(in, b), xp = lo_of(in, p);
    detail::clip(iv, xb - theta * xp, xa - xb);
    // phi*y_p - s*y_a - (1-s)*y_b <= 0
    const double ya = hi_of(out, a), yb = hi_of(out, b), yp = hi_of(out, p);
    detail::clip(iv, phi * yp - yb, yb - ya);
    return iv;
  };
  const double za = lo_of(MeasureBlock::kIntermediates, a);
  const double zb = lo_of(MeasureBlock::kIntermediates, b);
  // s*za + (1-s)*zb <= r*za + (1-r)*zb  <=>  (s - r)(za - zb) <= 0
  const auto coupled = [&](const detail::Interval& s, const detail::Interval& r) {
    const double d = za - zb;
    return d >= 0.0 ? s.lo <= r.hi + 1e-12 : s.hi >= r.lo - 1e-12;
  };
  const auto grouped = [](double theta, double phi) {
    return (theta <= 1.0 && phi >= 1.0) || (theta >= 1.0 && phi <= 1.0);
  };

  LatticeResult best;
  const auto scan = [&](std::array<double, 4> lo, double h, int steps) {
    std::vector<detail::StagePoint> s1, s2;
    for (int i = 0; i <= steps; ++i) {
      for (int k = 0; k <= steps; ++k) {
        const double t1 = lo[0] + i * h, f1 = lo[1] + k * h;
        if (t1 >= 0.0 && f1 >= 0.0 && grouped(t1, f1)) {
          const auto iv = stage(MeasureBlock::kStage1Inputs, MeasureBlock::kStage1Outputs, t1, f1);
          if (!iv.empty()) s1.push_back({t1, f1, iv});
        }
        const double t2 = lo[2] + i * h, f2 = lo[3] + k * h;
        if (t2 >= 0.0 && f2 >= 0.0 && grouped(t2, f2)) {
          const auto iv = stage(MeasureBlock::kStage2Inputs, MeasureBlock::kStage2Outputs, t2, f2);
          if (!iv.empty()) s2.push_back({t2, f2, iv});
        }
      }
    }
    for (const auto& u : s1) {
      for (const auto& v : s2) {
        const double den = w1 * u.phi + w2 * v.phi;
        if (den <= 0.0) continue;
        const double val = (w1 * u.theta + w2 * v.theta) / den;
        if (val < best.value && coupled(u.s, v.s)) {
          best = {true, val, {u.theta, u.phi, v.theta, v.phi}};
        }
      }
    }
  };
  const double h = hi / coarse;
  scan({0.0, 0.0, 0.0, 0.0}, h, coarse);
  if (best.feasible) {
    const double fine = h / 10.0;
    const auto c = best.point;
    scan({c[0] - 2 * h, c[1] - 2 * h, c[2] - 2 * h, c[3] - 2 * h}, fine, 40);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Random small fractional programs with a known feasible point and bounded
// feasible set.

inline fdea::FractionalProgram random_fractional(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dims(2, 4), nrows(1, 3);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), pos(0.1, 2.0), point(0.0, 3.0);
  const std::size_t k = static_cast<std::size_t>(dims(rng));
  fdea::FractionalProgram fp;
  fp.info.kind = fdea::ProgramKind::kBlackBox;
  for (std::size_t i = 0; i < k; ++i) {
    fp.variables.push_back({fdea::VarRole::kTheta1, i, "v" + std::to_string(i)});
  }
  std::vector<double> x0(k);
  for (double& v : x0) v = point(rng);
  fp.numerator.coeffs.resize(k);
  fp.denominator.coeffs.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    fp.numerator.coeffs[i] = coef(rng);
    fp.denominator.coeffs[i] = pos(rng);
  }
  fp.numerator.constant = 10.0 + pos(rng);  // keeps N > 0 on the box
  fp.denominator.constant = pos(rng);

  const auto row_at = [&](const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += a[i] * x0[i];
    return s;
  };
  const int c = nrows(rng);
  for (int r = 0; r < c; ++r) {
    std::vector<double> a(k);
    for (double& v : a) v = coef(rng);
    const bool ge = rng() % 2 == 0;
    const double slack = pos(rng);
    fp.constraints.push_back({fdea::RowKind::kStage1Input, static_cast<std::size_t>(r), a,
                              ge ? fdea::Relation::kGreaterEqual : fdea::Relation::kLessEqual,
                              ge ? row_at(a) - slack : row_at(a) + slack});
  }
  // Box x_i <= 5 keeps every parametric LP bounded.
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> a(k, 0.0);
    a[i] = 1.0;
    fp.constraints.push_back({fdea::RowKind::kSwitch1, i, a, fdea::Relation::kLessEqual, 5.0});
  }
  return fp;
}

}  // namespace testing
