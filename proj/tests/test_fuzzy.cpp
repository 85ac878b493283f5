#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fdea/fuzzy.hpp"

using fdea::TriangularFuzzyNumber;
using Catch::Approx;

TEST_CASE("alpha-cut at zero is the support", "[fuzzy]") {
  const TriangularFuzzyNumber f{121305.68, 131854.00, 141083.78};
  const auto cut = fdea::alpha_cut(f, 0.0);
  CHECK(cut.lo == 121305.68);
  CHECK(cut.hi == 141083.78);
}

TEST_CASE("alpha-cut interpolates linearly", "[fuzzy]") {
  const auto cut = fdea::alpha_cut({2, 4, 8}, 0.5);
  CHECK(cut.lo == 3.0);
  CHECK(cut.hi == 6.0);
}

TEST_CASE("crisp numbers have point cuts at every level", "[fuzzy]") {
  const auto f = TriangularFuzzyNumber::crisp(7.25);
  CHECK(f.is_crisp());
  for (double a : {0.0, 0.3, 0.77, 1.0}) {
    const auto cut = fdea::alpha_cut(f, a);
    CHECK(cut.lo == 7.25);
    CHECK(cut.hi == 7.25);
  }
}

TEST_CASE("alpha-cut at one is the mode exactly", "[fuzzy]") {
  const TriangularFuzzyNumber f{0.1, 0.7, 0.9};
  const auto cut = fdea::alpha_cut(f, 1.0);
  CHECK(cut.lo == 0.7);
  CHECK(cut.hi == 0.7);
}

TEST_CASE("alpha outside [0,1] is a domain error", "[fuzzy]") {
  const TriangularFuzzyNumber f{1, 2, 3};
  CHECK_THROWS_AS(fdea::alpha_cut(f, -0.01), fdea::DomainError);
  CHECK_THROWS_AS(fdea::alpha_cut(f, 1.5), fdea::DomainError);
  CHECK_THROWS_AS(fdea::alpha_cut(f, std::nan("")), fdea::DomainError);
}

TEST_CASE("invalid triples are rejected by alpha_cut", "[fuzzy]") {
  CHECK_THROWS_AS(fdea::alpha_cut({3, 2, 1}, 0.5), fdea::ValidationError);
}

TEST_CASE("validation reports the first violated rule", "[fuzzy]") {
  CHECK_FALSE(fdea::validate({1, 2, 3}).has_value());
  CHECK(fdea::validate({3, 2, 1}).value() == "lower > mode");
  CHECK(fdea::validate({1, 2, std::nan("")}).value() == "non-finite");
  CHECK(fdea::validate({1, 3, 2}).value() == "mode > upper");
  CHECK(fdea::validate({0, 1, 2}).value() == "non-positive");
  CHECK(fdea::validate({1, 1, std::numeric_limits<double>::infinity()}).value() == "non-finite");
  // ordering-only check allows zero and negatives
  CHECK_FALSE(fdea::validate_ordering({-2, 0, 1}).has_value());
}

TEST_CASE("alpha-cuts are nested and bounded by the support", "[fuzzy][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0), a(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    double v[3] = {u(rng), u(rng), u(rng)};
    std::sort(v, v + 3);
    const TriangularFuzzyNumber f{v[0], v[1], v[2]};
    double a1 = a(rng), a2 = a(rng);
    if (a1 > a2) std::swap(a1, a2);
    const auto wide = fdea::alpha_cut(f, a1);
    const auto narrow = fdea::alpha_cut(f, a2);
    INFO("trial " << trial);
    CHECK(wide.lo <= wide.hi);
    CHECK(wide.contains(narrow));
    CHECK(fdea::alpha_cut(f, 0.0).contains(wide));
    CHECK(narrow.contains(fdea::alpha_cut(f, 1.0)));
    CHECK(wide.width() >= narrow.width());
  }
}

TEST_CASE("cut bounds of a sum are sums of the bounds", "[fuzzy][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 10.0), a(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double l1 = u(rng), l2 = u(rng);
    const TriangularFuzzyNumber f{l1, l1 + u(rng), l1 + 12 + u(rng)};
    const TriangularFuzzyNumber g{l2, l2 + u(rng), l2 + 12 + u(rng)};
    const double alpha = a(rng);
    const auto s = fdea::alpha_cut(f + g, alpha);
    CHECK(s.lo == Approx(fdea::lower_bound(f, alpha) + fdea::lower_bound(g, alpha)).epsilon(1e-12));
    CHECK(s.hi == Approx(fdea::upper_bound(f, alpha) + fdea::upper_bound(g, alpha)).epsilon(1e-12));
  }
}

TEST_CASE("scaling scales the cut", "[fuzzy]") {
  const TriangularFuzzyNumber f{2, 4, 8};
  const auto cut = fdea::alpha_cut(fdea::scale(f, 10.0), 0.5);
  CHECK(cut.lo == 30.0);
  CHECK(cut.hi == 60.0);
}
