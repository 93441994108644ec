#include <cmath>

#include "doctest.h"
#include "fcrm/levy.hpp"
#include "test_support.hpp"

using namespace fcrm;

namespace {

bool has_message(const ValidationReport& r, const std::string& needle) {
  for (const std::string& m : r.messages) {
    if (m.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validate: finite atomic measure") {
  const ValidationReport r = validate_levy(LevyMeasure::point_mass(1.0, 2.0));
  CHECK(r.ok);
  CHECK(r.min_x2_integral == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.small_jump_abs_mean == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("validate: atom at zero is rejected") {
  const ValidationReport r = validate_levy(LevyMeasure::point_mass(0.0, 1.0));
  CHECK_FALSE(r.ok);
  CHECK(has_message(r, "atom at zero"));
}

TEST_CASE("validate: power component against closed forms") {
  // integral of x^2 * x^{-1.5} over (0,1) = 2/3; of x * x^{-1.5} = 2
  LevyMeasure nu;
  nu.densities.push_back(PowerDensity{0.5, 1.0, 1.0, Side::Positive});
  const ValidationReport r = validate_levy(nu);
  CHECK(r.ok);
  CHECK(r.min_x2_integral == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(r.small_jump_abs_mean == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("validate: power with p >= 1 has divergent small-jump mean but stays admissible") {
  LevyMeasure nu;
  nu.densities.push_back(PowerDensity{1.5, 1.0, 1.0, Side::Positive});
  const ValidationReport r = validate_levy(nu);
  CHECK(r.ok);
  // min{x^2,1}: integral of x^{0.5}... x^2 x^{-2.5} = x^{-0.5} over (0,1) = 2
  CHECK(r.min_x2_integral == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(std::isinf(r.small_jump_abs_mean));
}

TEST_CASE("validate: power exponent outside (0,2)") {
  LevyMeasure nu;
  nu.densities.push_back(PowerDensity{2.5, 1.0, 1.0, Side::Positive});
  const ValidationReport r = validate_levy(nu);
  CHECK_FALSE(r.ok);
  CHECK(has_message(r, "integrability"));
}

TEST_CASE("validate: uniform and exponential closed forms") {
  {
    // height 1 on [0,2]: integral of min(x^2,1) = 1/3 + 1 = 4/3
    LevyMeasure nu;
    nu.densities.push_back(UniformDensity{0.0, 2.0, 1.0});
    CHECK(validate_levy(nu).min_x2_integral == doctest::Approx(4.0 / 3.0).epsilon(1e-8));
  }
  {
    // e^{-x} on (0,inf): 2 - 4/e
    LevyMeasure nu;
    nu.densities.push_back(ExponentialDensity{1.0, 1.0, Side::Positive});
    CHECK(validate_levy(nu).min_x2_integral ==
          doctest::Approx(2.0 - 4.0 / std::exp(1.0)).epsilon(1e-8));
  }
}

TEST_CASE("validate: infinite-cutoff power") {
  LevyMeasure nu;
  nu.densities.push_back(PowerDensity{0.5, 1.0, std::numeric_limits<double>::infinity(),
                                      Side::Positive});
  const ValidationReport r = validate_levy(nu);
  CHECK(r.ok);
  // 2/3 near the origin plus c/p = 2 beyond 1
  CHECK(r.min_x2_integral == doctest::Approx(2.0 / 3.0 + 2.0).epsilon(1e-7));
}

TEST_CASE("triplet_add: componentwise with atom merging") {
  const CharTriplet t1 = CharTriplet::free_triplet(1.0, 0.0);
  const CharTriplet t2 = CharTriplet::free_triplet(0.0, 2.0, LevyMeasure::point_mass(1.0, 3.0));
  const CharTriplet sum = triplet_add(t1, t2);
  CHECK(sum.a == 1.0);
  CHECK(sum.eta == 2.0);
  REQUIRE(sum.nu.atoms.size() == 1);
  CHECK(sum.nu.atoms[0].weight == 3.0);

  const CharTriplet zero = CharTriplet::free_triplet(0.0, 0.0);
  CHECK(triplets_close(triplet_add(t2, zero), t2, 0.0));

  const CharTriplet poisson = CharTriplet::free_triplet(0.0, 1.0, LevyMeasure::point_mass(1.0, 1.0));
  const CharTriplet doubled = triplet_add(poisson, poisson);
  CHECK(triplets_close(doubled,
                       CharTriplet::free_triplet(0.0, 2.0, LevyMeasure::point_mass(1.0, 2.0)),
                       1e-12));
}

TEST_CASE("triplet_add: mixed kinds throw") {
  const CharTriplet f = CharTriplet::free_triplet(0.0, 0.0);
  const CharTriplet c = CharTriplet::classical_triplet(0.0, 0.0);
  CHECK_THROWS_WITH_AS(triplet_add(f, c), "mixed kinds", std::invalid_argument);
}

TEST_CASE("triplet_shift is drift addition") {
  CHECK(triplet_shift(CharTriplet::free_triplet(0.0, 0.0), 5.0).eta == 5.0);
  const CharTriplet t = CharTriplet::free_triplet(1.0, -1.0, LevyMeasure::point_mass(1.0, 1.0));
  CHECK(triplets_close(triplet_shift(t, 0.0), t, 0.0));
  CHECK(triplet_shift(t, 1.0).eta == 0.0);
}

TEST_CASE("atoms merge within the location tolerance") {
  const LevyMeasure a = LevyMeasure::point_mass(1.0, 1.0);
  const LevyMeasure b = LevyMeasure::point_mass(1.0 + 1e-13, 2.0);
  const LevyMeasure sum = add_measures(a, b);
  REQUIRE(sum.atoms.size() == 1);
  CHECK(sum.atoms[0].weight == doctest::Approx(3.0));
}

TEST_CASE("triplet algebra properties on random inputs") {
  testing::Gen gen(20240917);
  for (int trial = 0; trial < 40; ++trial) {
    const CharTriplet t1 = gen.random_triplet(TripletKind::Free);
    const CharTriplet t2 = gen.random_triplet(TripletKind::Free);
    const CharTriplet t3 = gen.random_triplet(TripletKind::Free);

    CHECK(triplets_close(triplet_add(t1, t2), triplet_add(t2, t1), 1e-12));
    CHECK(triplets_close(triplet_add(triplet_add(t1, t2), t3),
                         triplet_add(t1, triplet_add(t2, t3)), 1e-12));

    // min{x^2,1} is additive over measure addition
    const double lhs = validate_levy(add_measures(t1.nu, t2.nu)).min_x2_integral;
    const double rhs = validate_levy(t1.nu).min_x2_integral +
                       validate_levy(t2.nu).min_x2_integral;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("scale_measure scales every amplitude") {
  testing::Gen gen(7);
  const LevyMeasure nu = gen.positive_levy();
  const LevyMeasure doubled = scale_measure(nu, 2.0);
  CHECK(validate_levy(doubled).min_x2_integral ==
        doctest::Approx(2.0 * validate_levy(nu).min_x2_integral).epsilon(1e-9));
  CHECK(measures_close(add_measures(nu, nu), doubled, 1e-12));
  CHECK(scale_measure(nu, 0.0).empty());
}
