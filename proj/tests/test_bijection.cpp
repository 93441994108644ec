#include <cmath>

#include "doctest.h"
#include "fcrm/bijection.hpp"
#include "test_support.hpp"

using namespace fcrm;

TEST_CASE("bp_map retags and preserves every field") {
  testing::Gen gen(1001);
  for (int trial = 0; trial < 200; ++trial) {
    const CharTriplet t = gen.random_triplet(TripletKind::Classical);
    const CharTriplet mapped = bp_map(t);
    CHECK(mapped.kind == TripletKind::Free);
    CHECK(mapped.a == t.a);
    CHECK(mapped.eta == t.eta);
    CHECK(measures_close(mapped.nu, t.nu, 0.0));
    const CharTriplet back = bp_unmap(mapped);
    CHECK(back.kind == TripletKind::Classical);
    CHECK(triplets_close(back, t, 0.0));
  }
}

TEST_CASE("bp_map enforces the direction of the bijection") {
  const CharTriplet f = CharTriplet::free_triplet(0.0, 0.0);
  const CharTriplet c = CharTriplet::classical_triplet(0.0, 0.0);
  CHECK_THROWS_AS(bp_map(f), std::invalid_argument);
  CHECK_THROWS_AS(bp_unmap(c), std::invalid_argument);
}

TEST_CASE("the image of a point mass is the same point mass") {
  const CharTriplet t = CharTriplet::classical_triplet(0.0, 1.7);
  const CharTriplet mapped = bp_map(t);
  const DensityTable table = free_density(mapped, GridSpec::automatic(mapped, 64));
  REQUIRE(table.atom_report.size() == 1);
  CHECK(table.atom_report[0].location == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(std::abs(table.atom_report[0].mass - 1.0) <= 1e-6);
}

TEST_CASE("homomorphism identity at the triplet level (randomized)") {
  testing::Gen gen(7572);
  for (int trial = 0; trial < 200; ++trial) {
    const CharTriplet t1 = gen.random_triplet(TripletKind::Classical);
    const CharTriplet t2 = gen.random_triplet(TripletKind::Classical);
    const CharTriplet lhs = bp_map(triplet_add(t1, t2));
    const CharTriplet rhs = triplet_add(bp_map(t1), bp_map(t2));
    CHECK(triplets_close(lhs, rhs, 0.0));
  }
}

TEST_CASE("homomorphism check: point masses") {
  const CharTriplet t = CharTriplet::classical_triplet(0.0, 0.8);
  GridSpec g;
  g.lo = 0.0;
  g.hi = 3.0;
  g.n = 65;
  const HomomorphismReport report = check_homomorphism(t, t, g, 100, 5);
  CHECK(report.triplet_exact);
  CHECK(report.free_density_ks <= 2.0 / 100.0);
  CHECK(report.classical_density_ks <= 2.0 / 100.0);
}

TEST_CASE("homomorphism check: two semicircle summands (small oracle)") {
  const CharTriplet gauss = CharTriplet::classical_triplet(1.0, 0.0);
  GridSpec g;
  g.lo = -3.4;
  g.hi = 3.4;
  g.n = 201;
  const HomomorphismReport report = check_homomorphism(gauss, gauss, g, 300, 12);
  CHECK(report.triplet_exact);
  CHECK(report.free_density_ks <= 0.09);
  CHECK(report.classical_density_ks <= 0.025);
}
