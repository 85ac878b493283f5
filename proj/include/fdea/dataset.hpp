#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fdea/error.hpp"
#include "fdea/fuzzy.hpp"

namespace fdea {

using DmuIndex = std::size_t;

/// The five measure groups of a two-stage unit. The order is also the column
/// order used by the dataset file format.
enum class MeasureBlock : std::size_t {
  kStage1Inputs = 0,
  kStage1Outputs = 1,
  kIntermediates = 2,
  kStage2Inputs = 3,
  kStage2Outputs = 4,
};

inline constexpr std::array<MeasureBlock, 5> kAllBlocks = {
    MeasureBlock::kStage1Inputs, MeasureBlock::kStage1Outputs, MeasureBlock::kIntermediates,
    MeasureBlock::kStage2Inputs, MeasureBlock::kStage2Outputs};

constexpr std::string_view block_key(MeasureBlock b) noexcept {
  switch (b) {
    case MeasureBlock::kStage1Inputs: return "stage1_inputs";
    case MeasureBlock::kStage1Outputs: return "stage1_outputs";
    case MeasureBlock::kIntermediates: return "intermediates";
    case MeasureBlock::kStage2Inputs: return "stage2_inputs";
    case MeasureBlock::kStage2Outputs: return "stage2_outputs";
  }
  return "?";
}

/// Dense row-major grid of fuzzy values: one row per DMU, one column per measure.
class FuzzyGrid {
public:
  FuzzyGrid() = default;
  FuzzyGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  const TriangularFuzzyNumber& operator()(std::size_t row, std::size_t col) const {
    return cells_[row * cols_ + col];
  }
  TriangularFuzzyNumber& operator()(std::size_t row, std::size_t col) {
    return cells_[row * cols_ + col];
  }

  std::span<const TriangularFuzzyNumber> row(std::size_t r) const {
    return {cells_.data() + r * cols_, cols_};
  }

  friend bool operator==(const FuzzyGrid&, const FuzzyGrid&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<TriangularFuzzyNumber> cells_;
};

/// One measure group: the measure names and the n x k grid of values.
struct MeasureGroup {
  std::vector<std::string> names;
  FuzzyGrid values;

  friend bool operator==(const MeasureGroup&, const MeasureGroup&) = default;
};

/// n decision-making units with fuzzy stage-1 inputs/outputs, intermediates
/// and stage-2 inputs/outputs. Validated on construction and immutable after.
class TwoStageDataset {
public:
  TwoStageDataset(std::vector<std::string> dmu_names, std::array<MeasureGroup, 5> groups)
      : dmu_names_(std::move(dmu_names)), groups_(std::move(groups)) {
    check();
  }

  std::size_t size() const noexcept { return dmu_names_.size(); }
  const std::vector<std::string>& dmu_names() const noexcept { return dmu_names_; }

  const MeasureGroup& group(MeasureBlock b) const noexcept {
    return groups_[static_cast<std::size_t>(b)];
  }
  const FuzzyGrid& values(MeasureBlock b) const noexcept { return group(b).values; }
  std::size_t count(MeasureBlock b) const noexcept { return group(b).names.size(); }

  std::size_t m1() const noexcept { return count(MeasureBlock::kStage1Inputs); }
  std::size_t s1() const noexcept { return count(MeasureBlock::kStage1Outputs); }
  std::size_t m2() const noexcept { return count(MeasureBlock::kStage2Inputs); }
  std::size_t s2() const noexcept { return count(MeasureBlock::kStage2Outputs); }
  std::size_t intermediates() const noexcept { return count(MeasureBlock::kIntermediates); }

  /// Copy with one measure column multiplied by `factor` (> 0) for every DMU.
  TwoStageDataset with_scaled_measure(MeasureBlock b, std::size_t col, double factor) const {
    if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
    if (col >= count(b)) throw ValidationError("measure column out of range");
    auto groups = groups_;
    auto& grid = groups[static_cast<std::size_t>(b)].values;
    for (std::size_t j = 0; j < size(); ++j) grid(j, col) = scale(grid(j, col), factor);
    return TwoStageDataset(dmu_names_, std::move(groups));
  }

  void check_index(DmuIndex p) const {
    if (p >= size()) {
      throw ValidationError("DMU index " + std::to_string(p) + " out of range (n = " +
                            std::to_string(size()) + ")");
    }
  }

  friend bool operator==(const TwoStageDataset&, const TwoStageDataset&) = default;

private:
  void check() const {
    const std::size_t n = dmu_names_.size();
    if (n < 2) throw ValidationError("dataset needs at least 2 DMUs, got " + std::to_string(n));
    std::unordered_set<std::string> seen;
    for (const auto& name : dmu_names_) {
      if (name.empty()) throw ValidationError("empty DMU name");
      if (!seen.insert(name).second) throw ValidationError("duplicate DMU name '" + name + "'");
    }
    for (MeasureBlock b : kAllBlocks) {
      const auto& g = group(b);
      const std::string key(block_key(b));
      if (g.names.empty()) throw ValidationError(key + ": at least one measure is required");
      if (g.values.rows() != n || g.values.cols() != g.names.size()) {
        throw ValidationError(key + ": grid is " + std::to_string(g.values.rows()) + "x" +
                              std::to_string(g.values.cols()) + ", expected " +
                              std::to_string(n) + "x" + std::to_string(g.names.size()));
      }
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < g.names.size(); ++i) {
          if (auto err = validate(g.values(j, i))) {
            throw ValidationError(key + "." + g.names[i] + " of DMU '" + dmu_names_[j] +
                                  "': " + *err);
          }
        }
      }
    }
  }

  std::vector<std::string> dmu_names_;
  std::array<MeasureGroup, 5> groups_;
};

}  // namespace fdea
