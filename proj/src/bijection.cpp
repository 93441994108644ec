#include "fcrm/bijection.hpp"

#include <algorithm>
#include <stdexcept>

#include "fcrm/oracle.hpp"

namespace fcrm {

namespace {

void require_valid(const CharTriplet& t) {
  const ValidationReport report = validate_levy(t.nu);
  if (!report.ok || t.a < 0.0) {
    throw std::invalid_argument("triplet failed validation");
  }
}

}  // namespace

CharTriplet bp_map(const CharTriplet& t) {
  if (t.kind != TripletKind::Classical) {
    throw std::invalid_argument("bp_map takes a CLASSICAL triplet");
  }
  require_valid(t);
  CharTriplet out = t;
  out.kind = TripletKind::Free;
  return out;
}

CharTriplet bp_unmap(const CharTriplet& t) {
  if (t.kind != TripletKind::Free) {
    throw std::invalid_argument("bp_unmap takes a FREE triplet");
  }
  require_valid(t);
  CharTriplet out = t;
  out.kind = TripletKind::Classical;
  return out;
}

HomomorphismReport check_homomorphism(const CharTriplet& t1, const CharTriplet& t2,
                                      const GridSpec& settings, int oracle_n, uint64_t seed) {
  require_valid(t1);
  require_valid(t2);
  if (t1.kind != TripletKind::Classical || t2.kind != TripletKind::Classical) {
    throw std::invalid_argument("check_homomorphism takes CLASSICAL triplets");
  }

  HomomorphismReport report;
  const CharTriplet sum_classical = triplet_add(t1, t2);
  const CharTriplet mapped_sum = bp_map(sum_classical);
  const CharTriplet sum_mapped = triplet_add(bp_map(t1), bp_map(t2));
  report.triplet_exact = triplets_close(mapped_sum, sum_mapped, 0.0);
  if (!report.triplet_exact) {
    report.details.push_back("triplet-level identity failed");
  }

  // Free side: recovered density of the mapped sum vs the rotated-sum oracle.
  {
    const DensityTable table = free_density(mapped_sum, settings);
    const EmpiricalSpectrum spectrum = free_add_oracle(
        {matrix_model_for(bp_map(t1)), matrix_model_for(bp_map(t2))}, oracle_n, seed);
    report.free_density_ks = ks_between(table, spectrum.values);
    report.details.push_back("free side KS = " + std::to_string(report.free_density_ks));
  }

  // Classical side: Fourier-recovered density of the sum vs Monte Carlo sums
  // of independent samples.
  {
    const GridSpec classical_grid = GridSpec::automatic(sum_classical, settings.n);
    const DensityTable table = classical_density(sum_classical, classical_grid);
    constexpr int kReps = 10000;
    const std::vector<double> raw1 = classical_id_samples_raw(t1, kReps, seed + 1);
    const std::vector<double> raw2 = classical_id_samples_raw(t2, kReps, seed + 2);
    std::vector<double> sums(kReps);
    for (int i = 0; i < kReps; ++i) sums[i] = raw1[i] + raw2[i];
    std::sort(sums.begin(), sums.end());
    report.classical_density_ks = ks_between(table, sums);
    report.details.push_back("classical side KS = " +
                             std::to_string(report.classical_density_ks));
  }
  return report;
}

}  // namespace fcrm
