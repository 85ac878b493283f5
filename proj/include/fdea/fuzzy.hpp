#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "fdea/error.hpp"

namespace fdea {

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr bool contains(const Interval& other) const noexcept {
    return lo <= other.lo && other.hi <= hi;
  }
  constexpr double width() const noexcept { return hi - lo; }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

/// Triangular fuzzy number (lower, mode, upper). Membership rises linearly
/// from lower to mode and falls linearly from mode to upper.
///
/// The type accepts any triple; use validate() or validate_measure() to
/// check ordering, finiteness and (for DEA measures) positivity.
struct TriangularFuzzyNumber {
  double lower = 0.0;
  double mode = 0.0;
  double upper = 0.0;

  static constexpr TriangularFuzzyNumber crisp(double value) noexcept {
    return {value, value, value};
  }

  constexpr bool is_crisp() const noexcept { return lower == mode && mode == upper; }

  friend constexpr bool operator==(const TriangularFuzzyNumber&,
                                   const TriangularFuzzyNumber&) = default;
};

/// Component-wise sum. The alpha-cut bounds of the sum equal the sums of the
/// bounds, which is all the model construction relies on.
constexpr TriangularFuzzyNumber operator+(const TriangularFuzzyNumber& a,
                                          const TriangularFuzzyNumber& b) noexcept {
  return {a.lower + b.lower, a.mode + b.mode, a.upper + b.upper};
}

/// Scaling by a nonnegative factor keeps the triple ordered.
constexpr TriangularFuzzyNumber scale(const TriangularFuzzyNumber& a, double factor) noexcept {
  return {a.lower * factor, a.mode * factor, a.upper * factor};
}

/// Returns a description of the first violated rule, or nullopt when the
/// triple is a valid measure: finite, ordered and strictly positive.
inline std::optional<std::string> validate(const TriangularFuzzyNumber& f) {
  if (!std::isfinite(f.lower) || !std::isfinite(f.mode) || !std::isfinite(f.upper)) {
    return "non-finite";
  }
  if (f.lower > f.mode) return "lower > mode";
  if (f.mode > f.upper) return "mode > upper";
  if (f.lower <= 0.0) return "non-positive";
  return std::nullopt;
}

/// Ordering and finiteness only; the generic type allows zero and negative values.
inline std::optional<std::string> validate_ordering(const TriangularFuzzyNumber& f) {
  if (!std::isfinite(f.lower) || !std::isfinite(f.mode) || !std::isfinite(f.upper)) {
    return "non-finite";
  }
  if (f.lower > f.mode) return "lower > mode";
  if (f.mode > f.upper) return "mode > upper";
  return std::nullopt;
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha level " + std::to_string(alpha) + " is outside [0, 1]");
  }
}

/// Lower end of the alpha-cut: lower + alpha * (mode - lower).
inline double lower_bound(const TriangularFuzzyNumber& f, double alpha) {
  if (alpha == 1.0) return f.mode;
  return f.lower + alpha * (f.mode - f.lower);
}

/// Upper end of the alpha-cut: upper - alpha * (upper - mode).
inline double upper_bound(const TriangularFuzzyNumber& f, double alpha) {
  if (alpha == 1.0) return f.mode;
  return f.upper - alpha * (f.upper - f.mode);
}

/// Alpha-cut of a triangular fuzzy number. alpha = 0 gives the support
/// [lower, upper]; alpha = 1 collapses to [mode, mode].
inline Interval alpha_cut(const TriangularFuzzyNumber& f, double alpha) {
  check_alpha(alpha);
  if (auto err = validate_ordering(f)) {
    throw ValidationError("invalid fuzzy number: " + *err);
  }
  return {lower_bound(f, alpha), upper_bound(f, alpha)};
}

}  // namespace fdea
