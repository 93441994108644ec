#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fcrm/inversion.hpp"
#include "fcrm/oracle.hpp"
#include "fcrm/rng.hpp"
#include "test_support.hpp"

using namespace fcrm;

TEST_CASE("poisson sampler moments") {
  rng::Stream st(123, 0);
  for (double mean : {0.5, 4.0, 50.0}) {
    double sum = 0.0, sum2 = 0.0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) {
      const double k = static_cast<double>(st.poisson(mean));
      sum += k;
      sum2 += k * k;
    }
    const double m = sum / reps;
    const double v = sum2 / reps - m * m;
    CHECK(m == doctest::Approx(mean).epsilon(0.03));
    CHECK(v == doctest::Approx(mean).epsilon(0.08));
  }
}

TEST_CASE("normal sampler moments") {
  rng::Stream st(321, 5);
  double sum = 0.0, sum2 = 0.0;
  const int reps = 50000;
  for (int i = 0; i < reps; ++i) {
    const double z = st.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / reps) < 0.02);
  CHECK(sum2 / reps == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("determinism: identical (spec, n, seed) gives identical output") {
  const EmpiricalSpectrum g1 = sample_goe(1.0, 200, 42);
  const EmpiricalSpectrum g2 = sample_goe(1.0, 200, 42);
  CHECK(g1.values == g2.values);

  const LevyMeasure jump = LevyMeasure::point_mass(1.0, 1.0);
  const EmpiricalSpectrum c1 = sample_compound_free_poisson(2.0, jump, 200, 7);
  const EmpiricalSpectrum c2 = sample_compound_free_poisson(2.0, jump, 200, 7);
  CHECK(c1.values == c2.values);

  const EmpiricalSpectrum different = sample_goe(1.0, 200, 43);
  CHECK(g1.values != different.values);
}

TEST_CASE("GOE spectrum: moments and edge") {
  const EmpiricalSpectrum spectrum = sample_goe(1.0, 1000, 2024);
  double m2 = 0.0;
  double edge = 0.0;
  for (double v : spectrum.values) {
    m2 += v * v;
    edge = std::max(edge, std::abs(v));
  }
  m2 /= spectrum.values.size();
  CHECK(m2 > 0.9);
  CHECK(m2 < 1.1);
  CHECK(edge <= 2.3);
  CHECK(std::is_sorted(spectrum.values.begin(), spectrum.values.end()));
}

TEST_CASE("compound free Poisson: zero fraction at rate 1/2") {
  const EmpiricalSpectrum spectrum =
      sample_compound_free_poisson(0.5, LevyMeasure::point_mass(1.0, 1.0), 500, 11);
  double zeros = 0.0;
  double min_value = 0.0;
  for (double v : spectrum.values) {
    if (std::abs(v) < 1e-6) zeros += 1.0;
    min_value = std::min(min_value, v);
  }
  CHECK(zeros / spectrum.values.size() == doctest::Approx(0.5).epsilon(0.15));
  CHECK(min_value >= -1e-9);
}

TEST_CASE("compound free Poisson: empty sum gives the zero matrix") {
  const EmpiricalSpectrum spectrum =
      sample_compound_free_poisson(1e-9, LevyMeasure::point_mass(1.0, 1.0), 64, 3);
  for (double v : spectrum.values) CHECK(v == 0.0);
}

TEST_CASE("free_add oracle: shift only") {
  const EmpiricalSpectrum spectrum =
      free_add_oracle({MatrixModelSpec::shift(1.25)}, 64, 5);
  for (double v : spectrum.values) CHECK(v == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("free_add oracle: two GOE blocks give a wider semicircle") {
  const EmpiricalSpectrum spectrum =
      free_add_oracle({MatrixModelSpec::goe(1.0), MatrixModelSpec::goe(1.0)}, 400, 9);
  const CharTriplet t = CharTriplet::free_triplet(2.0, 0.0);
  GridSpec g;
  g.lo = -3.3;
  g.hi = 3.3;
  g.n = 241;
  const DensityTable table = free_density(t, g);
  CHECK(ks_between(table, spectrum.values) <= 0.08);
}

TEST_CASE("matrix model from a free triplet") {
  const CharTriplet t =
      CharTriplet::free_triplet(0.0, 4.0, LevyMeasure::point_mass(1.0, 4.0));
  const MatrixModelSpec spec = matrix_model_for(t);
  REQUIRE(spec.kind == MatrixModelSpec::Kind::Sum);
  // decompensated drift is 0, so only the compound block remains
  REQUIRE(spec.parts.size() == 1);
  CHECK(spec.parts[0].kind == MatrixModelSpec::Kind::CompoundFreePoisson);
  CHECK(spec.parts[0].cfp_rate == doctest::Approx(4.0));
}

TEST_CASE("classical_L: deterministic alpha-only model") {
  FcrmModel m;
  m.alpha.densities.push_back(UniformDensity{0.0, 3.0, 1.0});
  m.nu_E.densities.push_back(UniformDensity{0.0, 3.0, 1.0});
  m.nu_B = LevyMeasure{};
  // no jumps at all: every sample equals alpha(E)
  const EmpiricalSpectrum spectrum =
      sample_classical_L(m, RegionSet::parse("[0,2)"), 100, 17);
  for (double v : spectrum.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("classical_L: Poisson(2) sample moments and law") {
  FcrmModel m;
  m.nu_E.densities.push_back(UniformDensity{0.0, 2.0, 1.0});
  m.nu_B = LevyMeasure::point_mass(1.0, 1.0);
  const RegionSet e = RegionSet::parse("[0,2)");
  const EmpiricalSpectrum spectrum = sample_classical_L(m, e, 10000, 99);
  const double mean =
      std::accumulate(spectrum.values.begin(), spectrum.values.end(), 0.0) / spectrum.n;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.05));

  const CharTriplet classical = classical_counterpart_law(m, e);
  const DensityTable table = classical_density(classical, GridSpec::automatic(classical, 64));
  CHECK(ks_between(table, spectrum.values) <= 0.02);
}

TEST_CASE("classical_L: truncation flag for infinite-mass jump measures") {
  FcrmModel m;
  m.nu_E.densities.push_back(UniformDensity{0.0, 1.0, 1.0});
  m.nu_B.densities.push_back(PowerDensity{0.5, 1.0, 1.0, Side::Positive});
  const RegionSet e = RegionSet::parse("[0,1)");
  CHECK_THROWS_AS(sample_classical_L(m, e, 10, 1, /*truncate=*/false), std::invalid_argument);
  const EmpiricalSpectrum spectrum = sample_classical_L(m, e, 4000, 21);
  // mean of the half-stable subordinator piece: int_0^1 x nu(dx) = 2
  const double mean =
      std::accumulate(spectrum.values.begin(), spectrum.values.end(), 0.0) / spectrum.n;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("classical id sampler: normal triplet") {
  const CharTriplet t = CharTriplet::classical_triplet(1.0, 0.5);
  const EmpiricalSpectrum spectrum = sample_classical_id(t, 20000, 31);
  double sum = 0.0, sum2 = 0.0;
  for (double v : spectrum.values) {
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / spectrum.n;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
  CHECK(sum2 / spectrum.n - mean * mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("replicate streams are schedule independent") {
  const CharTriplet t = CharTriplet::classical_triplet(0.0, 0.0, LevyMeasure::point_mass(1.0, 2.0));
  const std::vector<double> all = classical_id_samples_raw(t, 50, 1234);
  const std::vector<double> prefix = classical_id_samples_raw(t, 10, 1234);
  for (int i = 0; i < 10; ++i) CHECK(all[i] == prefix[i]);
}
