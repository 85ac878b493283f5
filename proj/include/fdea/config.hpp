#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fdea/dataset.hpp"
#include "fdea/error.hpp"

namespace fdea {

/// Which possibility level governs each constraint family.
enum class EpsilonSlot : std::size_t {
  kStage1Inputs = 0,
  kStage2Inputs = 1,
  kStage1Outputs = 2,
  kStage2Outputs = 3,
  kIntermediates = 4,
};

/// Measures used by the single-stage (black-box) comparison model.
enum class BlackBoxComposition {
  /// Inputs: all stage-1 and stage-2 inputs. Outputs: all stage-1 and stage-2 outputs.
  kUnion,
  /// Inputs: stage-1 inputs. Outputs: stage-1 outputs.
  kStage1Only,
};

/// Evenly spaced grid start, start + step, ..., stop (inclusive when stop is
/// hit up to rounding). Values are rounded to 12 decimals to avoid drift.
inline std::vector<double> make_alpha_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw ValidationError("alpha grid needs step > 0 and stop >= start");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return grid;
}

/// {0.0, 0.1, ..., 1.0}
inline std::vector<double> default_alpha_grid() { return make_alpha_grid(0.0, 1.0, 0.1); }

struct ModelConfig {
  double w1 = 0.5;
  double w2 = 0.5;
  double big_m = 1e5;
  std::vector<double> alpha_grid = default_alpha_grid();
  /// Explicit possibility levels per constraint family; nullopt ties all five to alpha.
  std::optional<std::array<double, 5>> epsilon;
  /// Lower bound on the Charnes-Cooper scale variable.
  double t_floor = 1e-9;
  /// Row-scaled constraint violation accepted at an optimum.
  double feasibility_tol = 1e-7;
  /// Reduced-cost tolerance for the simplex optimality test.
  double optimality_tol = 1e-9;
  BlackBoxComposition blackbox = BlackBoxComposition::kUnion;

  double level(EpsilonSlot slot, double alpha) const {
    return epsilon ? (*epsilon)[static_cast<std::size_t>(slot)] : alpha;
  }

  ModelConfig with_weights(double first, double second) const {
    ModelConfig c = *this;
    c.w1 = first;
    c.w2 = second;
    return c;
  }

  void validate() const {
    if (!(w1 > 0.0 && w1 < 1.0 && w2 > 0.0 && w2 < 1.0)) {
      throw ValidationError("stage weights must lie in (0, 1)");
    }
    if (std::abs(w1 + w2 - 1.0) > 1e-9) throw ValidationError("stage weights must sum to 1");
    if (!(big_m > 0.0) || !std::isfinite(big_m)) throw ValidationError("big-M must be positive");
    if (alpha_grid.empty()) throw ValidationError("alpha grid is empty");
    for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
      const double a = alpha_grid[k];
      if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("alpha grid value outside [0, 1]");
      if (k > 0 && !(a > alpha_grid[k - 1])) {
        throw ValidationError("alpha grid must be strictly increasing");
      }
    }
    if (epsilon) {
      for (double e : *epsilon) {
        if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("possibility level outside [0, 1]");
      }
    }
    if (!(t_floor > 0.0)) throw ValidationError("t_floor must be positive");
    if (!(feasibility_tol > 0.0)) throw ValidationError("feasibility_tol must be positive");
    if (!(optimality_tol > 0.0)) throw ValidationError("optimality_tol must be positive");
  }

  /// Also checks that big-M dominates every theta/phi value an optimum can take:
  /// each is bounded by the largest upper bound over the smallest lower bound
  /// of its measure.
  void validate_for(const TwoStageDataset& data) const {
    validate();
    const double needed = required_big_m(data);
    if (!(big_m > needed)) {
      throw ValidationError("big-M " + std::to_string(big_m) + " does not exceed " +
                            std::to_string(needed) + " required by the dataset");
    }
  }

  static double required_big_m(const TwoStageDataset& data) {
    double ratio = 1.0;
    for (MeasureBlock b : kAllBlocks) {
      if (b == MeasureBlock::kIntermediates) continue;
      const auto& grid = data.values(b);
      for (std::size_t i = 0; i < grid.cols(); ++i) {
        double lo = grid(0, i).lower;
        double hi = grid(0, i).upper;
        for (std::size_t j = 1; j < grid.rows(); ++j) {
          lo = std::min(lo, grid(j, i).lower);
          hi = std::max(hi, grid(j, i).upper);
        }
        ratio = std::max(ratio, hi / lo);
      }
    }
    return ratio;
  }
};

}  // namespace fdea
