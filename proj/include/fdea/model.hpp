#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fdea/config.hpp"
#include "fdea/dataset.hpp"
#include "fdea/error.hpp"
#include "fdea/fuzzy.hpp"

namespace fdea {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

/// Value of a group-switch binary. kInside (0) forces theta <= 1 and phi >= 1
/// for its stage; kOutside (1) forces theta >= 1 and phi <= 1.
enum class Group : int { kInside = 0, kOutside = 1 };

constexpr int to_int(Group g) noexcept { return static_cast<int>(g); }

enum class ProgramKind { kTwoStage, kBlackBox };

enum class VarRole { kLambda1, kLambda2, kTheta1, kTheta2, kPhi1, kPhi2 };

enum class RowKind {
  kStage1Input,
  kStage2Input,
  kStage1Output,
  kStage2Output,
  kIntermediate,
  kConvexity1,
  kConvexity2,
  kSwitch1,
  kSwitch2,
};

struct Variable {
  VarRole role;
  /// DMU index for intensity variables, measure index for theta/phi.
  std::size_t index;
  std::string name;

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct AffineExpr {
  std::vector<double> coeffs;
  double constant = 0.0;

  double eval(std::span<const double> v) const {
    double s = constant;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * v[k];
    return s;
  }

  friend bool operator==(const AffineExpr&, const AffineExpr&) = default;
};

struct Constraint {
  RowKind kind;
  std::size_t index;  // measure index within its family, 0 for convexity rows
  std::vector<double> coeffs;
  Relation relation;
  double rhs;

  double lhs(std::span<const double> v) const {
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * v[k];
    return s;
  }

  bool satisfied(std::span<const double> v, double tol) const {
    const double a = lhs(v);
    switch (relation) {
      case Relation::kLessEqual: return a <= rhs + tol;
      case Relation::kGreaterEqual: return a >= rhs - tol;
      case Relation::kEqual: return std::abs(a - rhs) <= tol;
    }
    return false;
  }

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Half-open range [offset, offset + count) of variable positions.
struct VarSpan {
  std::size_t offset = 0;
  std::size_t count = 0;

  std::size_t operator[](std::size_t k) const noexcept { return offset + k; }
  friend bool operator==(const VarSpan&, const VarSpan&) = default;
};

struct ProgramLayout {
  VarSpan lambda1, lambda2, theta1, theta2, phi1, phi2;
  /// DMU index behind each intensity variable (the evaluated unit is absent).
  std::vector<DmuIndex> peers;

  friend bool operator==(const ProgramLayout&, const ProgramLayout&) = default;
};

struct ProgramInfo {
  ProgramKind kind = ProgramKind::kTwoStage;
  DmuIndex p = 0;
  double alpha = 0.0;
  Group delta1 = Group::kInside;
  Group delta2 = Group::kInside;  // unused for black-box programs
};

/// minimize numerator(v) / denominator(v) subject to linear constraints, v >= 0.
struct FractionalProgram {
  std::vector<Variable> variables;
  AffineExpr numerator;
  AffineExpr denominator;
  std::vector<Constraint> constraints;
  ProgramLayout layout;
  ProgramInfo info;

  std::size_t num_variables() const noexcept { return variables.size(); }

  std::string name() const {
    std::ostringstream os;
    os << (info.kind == ProgramKind::kTwoStage ? "two-stage" : "black-box") << " p=" << info.p
       << " alpha=" << info.alpha << " delta=(" << to_int(info.delta1);
    if (info.kind == ProgramKind::kTwoStage) os << "," << to_int(info.delta2);
    os << ")";
    return os.str();
  }

  double ratio(std::span<const double> v) const { return numerator.eval(v) / denominator.eval(v); }

  bool feasible(std::span<const double> v, double tol) const {
    for (double x : v) {
      if (x < -tol) return false;
    }
    for (const auto& c : constraints) {
      if (!c.satisfied(v, tol)) return false;
    }
    return true;
  }

  /// Dimensions agree and the denominator is nonnegative with a positive part.
  void validate() const {
    const std::size_t n = variables.size();
    if (numerator.coeffs.size() != n || denominator.coeffs.size() != n) {
      throw ValidationError(name() + ": objective size does not match variable count");
    }
    for (const auto& c : constraints) {
      if (c.coeffs.size() != n) {
        throw ValidationError(name() + ": constraint references undeclared variables");
      }
      if (!std::isfinite(c.rhs)) throw ValidationError(name() + ": non-finite right-hand side");
    }
    bool positive = denominator.constant > 0.0;
    for (double d : denominator.coeffs) {
      if (d < 0.0) throw ValidationError(name() + ": denominator has a negative coefficient");
      positive = positive || d > 0.0;
    }
    if (denominator.constant < 0.0 || !positive) {
      throw ValidationError(name() + ": denominator is identically zero");
    }
  }
};

/// Same variables, objective and constraints; provenance is ignored.
inline bool same_program(const FractionalProgram& a, const FractionalProgram& b) {
  return a.variables == b.variables && a.numerator == b.numerator &&
         a.denominator == b.denominator && a.constraints == b.constraints &&
         a.layout == b.layout;
}

namespace detail {

class ProgramBuilder {
public:
  explicit ProgramBuilder(FractionalProgram& fp) : fp_(fp) {}

  VarSpan add_block(VarRole role, std::string_view prefix, std::size_t count,
                    const std::vector<std::size_t>* ids = nullptr) {
    VarSpan span{fp_.variables.size(), count};
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t id = ids ? (*ids)[k] : k;
      fp_.variables.push_back({role, id, std::string(prefix) + "[" + std::to_string(id) + "]"});
    }
    return span;
  }

  std::vector<double> zero_row() const { return std::vector<double>(fp_.variables.size(), 0.0); }

  void add(RowKind kind, std::size_t index, std::vector<double> coeffs, Relation rel, double rhs) {
    fp_.constraints.push_back({kind, index, std::move(coeffs), rel, rhs});
  }

  /// Big-M rows switching the stage between (theta <= 1, phi >= 1) and
  /// (theta >= 1, phi <= 1).
  void add_switch(RowKind kind, VarSpan theta, VarSpan phi, Group delta, double big_m) {
    const double d = static_cast<double>(to_int(delta));
    for (std::size_t i = 0; i < theta.count; ++i) {
      auto up = zero_row();  // theta - 1 <= M delta
      up[theta[i]] = 1.0;
      add(kind, i, std::move(up), Relation::kLessEqual, 1.0 + big_m * d);
      auto down = zero_row();  // -theta + 1 <= M (1 - delta)
      down[theta[i]] = -1.0;
      add(kind, i, std::move(down), Relation::kLessEqual, big_m * (1.0 - d) - 1.0);
    }
    for (std::size_t r = 0; r < phi.count; ++r) {
      auto down = zero_row();  // -phi + 1 <= M delta
      down[phi[r]] = -1.0;
      add(kind, theta.count + r, std::move(down), Relation::kLessEqual, big_m * d - 1.0);
      auto up = zero_row();  // phi - 1 <= M (1 - delta)
      up[phi[r]] = 1.0;
      add(kind, theta.count + r, std::move(up), Relation::kLessEqual, 1.0 + big_m * (1.0 - d));
    }
  }

  /// sum_{j != p} lambda_j lo_ij - theta_i lo_ip <= 0, lower alpha-cut bounds.
  void add_inputs(RowKind kind, const FuzzyGrid& grid, VarSpan lambda, VarSpan theta,
                  const std::vector<DmuIndex>& peers, DmuIndex p, double level) {
    for (std::size_t i = 0; i < grid.cols(); ++i) {
      auto row = zero_row();
      for (std::size_t k = 0; k < peers.size(); ++k) {
        row[lambda[k]] = lower_bound(grid(peers[k], i), level);
      }
      row[theta[i]] = -lower_bound(grid(p, i), level);
      add(kind, i, std::move(row), Relation::kLessEqual, 0.0);
    }
  }

  /// sum_{j != p} lambda_j hi_rj - phi_r hi_rp >= 0, upper alpha-cut bounds.
  void add_outputs(RowKind kind, const FuzzyGrid& grid, VarSpan lambda, VarSpan phi,
                   const std::vector<DmuIndex>& peers, DmuIndex p, double level) {
    for (std::size_t r = 0; r < grid.cols(); ++r) {
      auto row = zero_row();
      for (std::size_t k = 0; k < peers.size(); ++k) {
        row[lambda[k]] = upper_bound(grid(peers[k], r), level);
      }
      row[phi[r]] = -upper_bound(grid(p, r), level);
      add(kind, r, std::move(row), Relation::kGreaterEqual, 0.0);
    }
  }

  void add_convexity(RowKind kind, VarSpan lambda) {
    auto row = zero_row();
    for (std::size_t k = 0; k < lambda.count; ++k) row[lambda[k]] = 1.0;
    add(kind, 0, std::move(row), Relation::kEqual, 1.0);
  }

  /// w * (1/count) * sum over the span.
  void add_mean(AffineExpr& expr, VarSpan span, double weight) const {
    for (std::size_t k = 0; k < span.count; ++k) {
      expr.coeffs[span[k]] += weight / static_cast<double>(span.count);
    }
  }

private:
  FractionalProgram& fp_;
};

inline std::vector<DmuIndex> peers_of(std::size_t n, DmuIndex p) {
  std::vector<DmuIndex> peers;
  peers.reserve(n - 1);
  for (DmuIndex j = 0; j < n; ++j) {
    if (j != p) peers.push_back(j);
  }
  return peers;
}

inline void check_build_args(const TwoStageDataset& data, DmuIndex p, double alpha,
                             const ModelConfig& cfg) {
  data.check_index(p);
  check_alpha(alpha);
  cfg.validate();
}

}  // namespace detail

/// Fractional program of the fuzzy two-stage super-efficiency model for DMU
/// `p` at level `alpha`, with both group switches fixed.
///
/// Variables are laid out as lambda1 (n-1), lambda2 (n-1), theta1 (m1),
/// theta2 (m2), phi1 (s1), phi2 (s2). Rows come in the order: stage-1 inputs,
/// stage-2 inputs, stage-1 outputs, stage-2 outputs, intermediates, the two
/// convexity rows, then the stage-1 and stage-2 switch rows. Intermediate
/// rows use the lower alpha-cut bound on both the lambda1 and lambda2 side.
inline FractionalProgram build_two_stage_program(const TwoStageDataset& data, DmuIndex p,
                                                 double alpha, Group delta1, Group delta2,
                                                 const ModelConfig& cfg) {
  detail::check_build_args(data, p, alpha, cfg);

  FractionalProgram fp;
  fp.info = {ProgramKind::kTwoStage, p, alpha, delta1, delta2};
  auto& lay = fp.layout;
  lay.peers = detail::peers_of(data.size(), p);

  detail::ProgramBuilder b(fp);
  lay.lambda1 = b.add_block(VarRole::kLambda1, "lambda1", lay.peers.size(), &lay.peers);
  lay.lambda2 = b.add_block(VarRole::kLambda2, "lambda2", lay.peers.size(), &lay.peers);
  lay.theta1 = b.add_block(VarRole::kTheta1, "theta1", data.m1());
  lay.theta2 = b.add_block(VarRole::kTheta2, "theta2", data.m2());
  lay.phi1 = b.add_block(VarRole::kPhi1, "phi1", data.s1());
  lay.phi2 = b.add_block(VarRole::kPhi2, "phi2", data.s2());

  const std::size_t nv = fp.variables.size();
  fp.numerator.coeffs.assign(nv, 0.0);
  fp.denominator.coeffs.assign(nv, 0.0);
  b.add_mean(fp.numerator, lay.theta1, cfg.w1);
  b.add_mean(fp.numerator, lay.theta2, cfg.w2);
  b.add_mean(fp.denominator, lay.phi1, cfg.w1);
  b.add_mean(fp.denominator, lay.phi2, cfg.w2);

  b.add_inputs(RowKind::kStage1Input, data.values(MeasureBlock::kStage1Inputs), lay.lambda1,
               lay.theta1, lay.peers, p, cfg.level(EpsilonSlot::kStage1Inputs, alpha));
  b.add_inputs(RowKind::kStage2Input, data.values(MeasureBlock::kStage2Inputs), lay.lambda2,
               lay.theta2, lay.peers, p, cfg.level(EpsilonSlot::kStage2Inputs, alpha));
  b.add_outputs(RowKind::kStage1Output, data.values(MeasureBlock::kStage1Outputs), lay.lambda1,
                lay.phi1, lay.peers, p, cfg.level(EpsilonSlot::kStage1Outputs, alpha));
  b.add_outputs(RowKind::kStage2Output, data.values(MeasureBlock::kStage2Outputs), lay.lambda2,
                lay.phi2, lay.peers, p, cfg.level(EpsilonSlot::kStage2Outputs, alpha));

  const auto& z = data.values(MeasureBlock::kIntermediates);
  const double zl = cfg.level(EpsilonSlot::kIntermediates, alpha);
  for (std::size_t f = 0; f < z.cols(); ++f) {
    auto row = b.zero_row();
    for (std::size_t k = 0; k < lay.peers.size(); ++k) {
      const double lo = lower_bound(z(lay.peers[k], f), zl);
      row[lay.lambda1[k]] = lo;
      row[lay.lambda2[k]] = -lo;
    }
    b.add(RowKind::kIntermediate, f, std::move(row), Relation::kLessEqual, 0.0);
  }

  b.add_convexity(RowKind::kConvexity1, lay.lambda1);
  b.add_convexity(RowKind::kConvexity2, lay.lambda2);
  b.add_switch(RowKind::kSwitch1, lay.theta1, lay.phi1, delta1, cfg.big_m);
  b.add_switch(RowKind::kSwitch2, lay.theta2, lay.phi2, delta2, cfg.big_m);
  return fp;
}

/// Single-stage program that ignores the intermediates. With the default
/// composition the inputs are all stage-1 then stage-2 inputs and the outputs
/// are all stage-1 then stage-2 outputs; the theta1/phi1 spans cover them.
inline FractionalProgram build_blackbox_program(const TwoStageDataset& data, DmuIndex p,
                                                double alpha, Group delta,
                                                const ModelConfig& cfg) {
  detail::check_build_args(data, p, alpha, cfg);
  const bool with_stage2 = cfg.blackbox == BlackBoxComposition::kUnion;

  FractionalProgram fp;
  fp.info = {ProgramKind::kBlackBox, p, alpha, delta, Group::kInside};
  auto& lay = fp.layout;
  lay.peers = detail::peers_of(data.size(), p);

  const std::size_t m = data.m1() + (with_stage2 ? data.m2() : 0);
  const std::size_t s = data.s1() + (with_stage2 ? data.s2() : 0);

  detail::ProgramBuilder b(fp);
  lay.lambda1 = b.add_block(VarRole::kLambda1, "lambda", lay.peers.size(), &lay.peers);
  lay.theta1 = b.add_block(VarRole::kTheta1, "theta", m);
  lay.phi1 = b.add_block(VarRole::kPhi1, "phi", s);
  lay.lambda2 = {fp.variables.size(), 0};
  lay.theta2 = lay.lambda2;
  lay.phi2 = lay.lambda2;

  const std::size_t nv = fp.variables.size();
  fp.numerator.coeffs.assign(nv, 0.0);
  fp.denominator.coeffs.assign(nv, 0.0);
  b.add_mean(fp.numerator, lay.theta1, 1.0);
  b.add_mean(fp.denominator, lay.phi1, 1.0);

  const VarSpan theta_a{lay.theta1.offset, data.m1()};
  const VarSpan phi_a{lay.phi1.offset, data.s1()};
  b.add_inputs(RowKind::kStage1Input, data.values(MeasureBlock::kStage1Inputs), lay.lambda1,
               theta_a, lay.peers, p, cfg.level(EpsilonSlot::kStage1Inputs, alpha));
  if (with_stage2) {
    const VarSpan theta_b{lay.theta1.offset + data.m1(), data.m2()};
    b.add_inputs(RowKind::kStage2Input, data.values(MeasureBlock::kStage2Inputs), lay.lambda1,
                 theta_b, lay.peers, p, cfg.level(EpsilonSlot::kStage2Inputs, alpha));
  }
  b.add_outputs(RowKind::kStage1Output, data.values(MeasureBlock::kStage1Outputs), lay.lambda1,
                phi_a, lay.peers, p, cfg.level(EpsilonSlot::kStage1Outputs, alpha));
  if (with_stage2) {
    const VarSpan phi_b{lay.phi1.offset + data.s1(), data.s2()};
    b.add_outputs(RowKind::kStage2Output, data.values(MeasureBlock::kStage2Outputs), lay.lambda1,
                  phi_b, lay.peers, p, cfg.level(EpsilonSlot::kStage2Outputs, alpha));
  }
  b.add_convexity(RowKind::kConvexity1, lay.lambda1);
  b.add_switch(RowKind::kSwitch1, lay.theta1, lay.phi1, delta, cfg.big_m);
  return fp;
}

}  // namespace fdea
