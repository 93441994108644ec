#include <cmath>

#include "doctest.h"
#include "fcrm/inversion.hpp"
#include "test_support.hpp"

using namespace fcrm;

TEST_CASE("solve_F: point mass") {
  const CharTriplet t = CharTriplet::free_triplet(0.0, 1.5);
  const Complex zeta{1.5, 1.0};
  const auto [u, diag] = solve_F(t, zeta);
  CHECK(diag.converged);
  CHECK(std::abs(u - Complex{0.0, 1.0}) < 1e-12);
  CHECK(std::abs(1.0 / u - Complex{0.0, -1.0}) < 1e-12);
}

TEST_CASE("solve_F: semicircle at 2i") {
  const CharTriplet t = CharTriplet::free_triplet(1.0, 0.0);
  const auto [u, diag] = solve_F(t, Complex{0.0, 2.0});
  CHECK(diag.converged);
  CHECK(diag.residual <= 1e-10 * 2.0);
  CHECK(std::abs(u - Complex{0.0, 1.0 + std::sqrt(2.0)}) < 1e-9);
}

TEST_CASE("solve_F: far field behaves like zeta - eta") {
  testing::Gen gen(5);
  for (int i = 0; i < 5; ++i) {
    const CharTriplet t = gen.random_triplet(TripletKind::Free);
    const Complex zeta{3.0, 1e6};
    const auto [u, diag] = solve_F(t, zeta);
    CHECK(diag.converged);
    CHECK(std::abs(u - (zeta - t.eta)) <= 1e-3 * std::abs(zeta - t.eta));
  }
}

TEST_CASE("solve_F: domain and half-plane preservation") {
  const CharTriplet t = CharTriplet::free_triplet(1.0, 0.0);
  CHECK_THROWS_AS(solve_F(t, Complex{0.0, -1.0}), std::domain_error);

  testing::Gen gen(6);
  for (int i = 0; i < 40; ++i) {
    const CharTriplet tr = gen.random_triplet(TripletKind::Free);
    const Complex zeta{gen.uniform(-4.0, 4.0), gen.uniform(1e-3, 2.0)};
    const auto [u, diag] = solve_F(tr, zeta);
    CHECK(diag.converged);
    CHECK(u.imag() >= zeta.imag() * (1.0 - 1e-12));
  }
}

TEST_CASE("free_density: semicircle") {
  const CharTriplet t = CharTriplet::free_triplet(1.0, 0.0);
  GridSpec g;
  g.lo = -2.4;
  g.hi = 2.4;
  g.n = 301;
  const DensityTable table = free_density(t, g);

  double sup_err = 0.0;
  for (size_t i = 0; i < table.xs.size(); ++i) {
    const double x = table.xs[i];
    if (std::abs(x) > 1.9) continue;
    sup_err = std::max(sup_err,
                       std::abs(table.rho[i] - testing::semicircle_density(1.0, x)));
  }
  CHECK(sup_err <= 2e-3);
  CHECK(std::abs(table.mass_deficit) <= 5e-3);
  CHECK(table.atom_report.empty());
}

TEST_CASE("free_density: Marchenko-Pastur rate 4") {
  const CharTriplet t = CharTriplet::free_triplet(0.0, 4.0, LevyMeasure::point_mass(1.0, 4.0));
  GridSpec g;
  g.lo = -1.0;
  g.hi = 11.0;
  g.n = 301;
  const DensityTable table = free_density(t, g);

  // value at x = 4: sqrt(15)/(8 pi)
  double rho4 = 0.0;
  for (size_t i = 0; i < table.xs.size(); ++i) {
    if (std::abs(table.xs[i] - 4.0) < 0.5 * g.spacing()) rho4 = table.rho[i];
  }
  CHECK(rho4 == doctest::Approx(std::sqrt(15.0) / (8.0 * M_PI)).epsilon(5e-3));
  CHECK(std::abs(table.mass_deficit) <= 1e-2);
}

TEST_CASE("free_density: point-mass short circuit") {
  const CharTriplet t = CharTriplet::free_triplet(0.0, 0.7);
  const DensityTable table = free_density(t, GridSpec::automatic(t, 64));
  REQUIRE(table.atom_report.size() == 1);
  CHECK(table.atom_report[0].location == doctest::Approx(0.7));
  CHECK(table.atom_report[0].mass == doctest::Approx(1.0));
  for (double v : table.rho) CHECK(v == 0.0);
}

TEST_CASE("free_density: Marchenko-Pastur rate 1/2 has an atom at zero") {
  const CharTriplet t = CharTriplet::free_triplet(0.0, 0.5, LevyMeasure::point_mass(1.0, 0.5));
  GridSpec g;
  g.lo = -1.0;
  g.hi = 3.5;
  g.n = 301;
  const DensityTable table = free_density(t, g);
  REQUIRE_FALSE(table.atom_report.empty());
  CHECK(std::abs(table.atom_report[0].location) < 0.05);
  CHECK(table.atom_report[0].mass == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(table.mass_deficit) <= 2e-2);
}

TEST_CASE("free_density mass completeness on random free-regular laws") {
  testing::Gen gen(77);
  for (int i = 0; i < 5; ++i) {
    const CharTriplet t = gen.free_regular_law();
    const DensityTable table = free_density(t, GridSpec::automatic(t, 201));
    CHECK(std::abs(table.mass_deficit) <= 2e-2);
  }
}

TEST_CASE("cauchy transform of the recovered semicircle matches 1/u") {
  const CharTriplet t = CharTriplet::free_triplet(1.0, 0.0);
  GridSpec g;
  g.lo = -2.4;
  g.hi = 2.4;
  g.n = 401;
  const ConcreteLaw law = to_concrete_law(free_density(t, g));
  testing::Gen gen(13);
  for (int i = 0; i < 20; ++i) {
    const Complex zeta{gen.uniform(-3.0, 3.0), gen.uniform(0.3, 2.0)};
    const auto [u, diag] = solve_F(t, zeta);
    CHECK(std::abs(cauchy_transform(law, zeta) - 1.0 / u) <= 1e-3);
  }
}

TEST_CASE("classical_density: standard normal") {
  const CharTriplet t = CharTriplet::classical_triplet(1.0, 0.0);
  GridSpec g;
  g.lo = -4.5;
  g.hi = 4.5;
  g.n = 301;
  const DensityTable table = classical_density(t, g);
  double sup_err = 0.0;
  for (size_t i = 0; i < table.xs.size(); ++i) {
    if (std::abs(table.xs[i]) > 3.0) continue;
    sup_err = std::max(sup_err, std::abs(table.rho[i] - testing::normal_pdf(table.xs[i])));
  }
  CHECK(sup_err <= 1e-6);
  CHECK(std::abs(table.mass_deficit) <= 1e-4);
}

TEST_CASE("classical_density: Poisson(1) lattice fallback") {
  const CharTriplet t = CharTriplet::classical_triplet(0.0, 1.0, LevyMeasure::point_mass(1.0, 1.0));
  const DensityTable table = classical_density(t, GridSpec::automatic(t, 64));
  REQUIRE(table.atom_report.size() >= 8);
  const double e1 = std::exp(-1.0);
  double factorial = 1.0;
  for (int k = 0; k < 8; ++k) {
    if (k > 0) factorial *= k;
    CHECK(table.atom_report[k].location == doctest::Approx(static_cast<double>(k)).epsilon(1e-12));
    CHECK(table.atom_report[k].mass == doctest::Approx(e1 / factorial).epsilon(1e-9));
  }
  CHECK(std::abs(table.mass_deficit) <= 1e-9);
}

TEST_CASE("classical_density: delta at the drift") {
  const CharTriplet t = CharTriplet::classical_triplet(0.0, 0.0);
  const DensityTable table = classical_density(t, GridSpec::automatic(t, 32));
  REQUIRE(table.atom_report.size() == 1);
  CHECK(table.atom_report[0].location == doctest::Approx(0.0));
  CHECK(table.atom_report[0].mass == doctest::Approx(1.0));
}

TEST_CASE("classical_density: Gaussian convolved with Poisson jumps") {
  // triplet (1, 0, delta_1): X = -1 + Z + P with P ~ Poisson(1),
  // density(x) = sum_k e^{-1}/k! phi(x - (k-1))
  const CharTriplet t = CharTriplet::classical_triplet(1.0, 0.0, LevyMeasure::point_mass(1.0, 1.0));
  GridSpec g;
  g.lo = -5.0;
  g.hi = 9.0;
  g.n = 281;
  const DensityTable table = classical_density(t, g);
  auto reference = [](double x) {
    double acc = 0.0;
    double factorial = 1.0;
    for (int k = 0; k < 30; ++k) {
      if (k > 0) factorial *= k;
      acc += std::exp(-1.0) / factorial * testing::normal_pdf(x - (k - 1.0));
    }
    return acc;
  };
  double sup_err = 0.0;
  for (size_t i = 0; i < table.xs.size(); ++i) {
    sup_err = std::max(sup_err, std::abs(table.rho[i] - reference(table.xs[i])));
  }
  CHECK(sup_err <= 1e-6);
}

TEST_CASE("ks_between: degenerate and discretization cases") {
  DensityTable atom_table;
  atom_table.atom_report.push_back({0.0, 1.0});
  const std::vector<double> zeros(50, 0.0);
  CHECK(ks_between(atom_table, zeros) <= 1.0 / 50.0);

  // uniform [0,1] table vs its own quantiles
  DensityTable uniform_table;
  const int n = 101;
  for (int i = 0; i < n; ++i) {
    uniform_table.xs.push_back(static_cast<double>(i) / (n - 1));
    uniform_table.rho.push_back(1.0);
  }
  std::vector<double> quantiles;
  for (int i = 0; i < 200; ++i) quantiles.push_back((i + 0.5) / 200.0);
  CHECK(ks_between(uniform_table, quantiles) <= 1.0 / 200.0 + 1e-9);
}

TEST_CASE("ks_between rejects incomplete tables") {
  DensityTable bad;
  bad.atom_report.push_back({0.0, 0.5});
  bad.mass_deficit = 0.5;
  const std::vector<double> samples(10, 0.0);
  CHECK_THROWS_AS(ks_between(bad, samples), std::invalid_argument);
}
