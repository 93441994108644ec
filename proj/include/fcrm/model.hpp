#pragma once

#include <span>
#include <string>
#include <vector>

#include "fcrm/levy.hpp"
#include "fcrm/region.hpp"
#include "fcrm/transforms.hpp"

namespace fcrm {

/// A sigma-finite deterministic measure on the line: weighted atoms (any
/// location, including 0) plus density components.
struct BaseMeasure {
  std::vector<LevyAtom> atoms;
  std::vector<DensityComponent> densities;

  bool empty() const { return atoms.empty() && densities.empty(); }
};

/// A fixed atom of the random measure: a location carrying a positive free
/// random weight, described by a free-regular triplet.
struct FixedAtom {
  double location = 0.0;
  CharTriplet law;
};

/// The data behind the decomposition G(E) = alpha(E) + H(E) + J(E):
/// deterministic part alpha, Poisson-integral intensity nu_E x nu_B, and the
/// fixed atoms with their laws.
struct FcrmModel {
  BaseMeasure alpha;
  BaseMeasure nu_E;
  LevyMeasure nu_B;  // supported on (0, inf), finite small-jump mean
  std::vector<FixedAtom> fixed_atoms;
};

struct ModelReport {
  bool ok = false;
  std::vector<std::string> messages;
};

/// a = 0, nu on (0, inf), decompensated drift >= 0; writes the reason to
/// `why` on failure when given.
bool is_free_regular(const CharTriplet& t, std::string* why = nullptr);

ModelReport validate_model(const FcrmModel& m);

/// alpha(E) / nu_E(E): atom weights for locations in E plus closed-form
/// density masses over the intervals. May be +inf for measures that are not
/// sigma-finite on E's closure around a power-law origin.
double region_mass(const BaseMeasure& m, const RegionSet& E);

/// Law of the Poisson-integral component on E: with lambda = nu_E(E), the
/// free triplet (0, lambda * int_{(0,1]} x nu_B(dx), lambda nu_B). Requires
/// the finite small-jump mean of nu_B.
CharTriplet h_law(const FcrmModel& m, const RegionSet& E);

/// Law of the fixed-atom component on E: the triplet sum of the laws of all
/// fixed atoms located in E.
CharTriplet j_law(const FcrmModel& m, const RegionSet& E);

/// Law of G(E): h_law + j_law shifted by alpha(E).
CharTriplet g_law(const FcrmModel& m, const RegionSet& E);

/// Classical counterpart of g_law for models without fixed atoms: identical
/// triplet data with the classical tag. bp_map of the result is g_law.
CharTriplet classical_counterpart_law(const FcrmModel& m, const RegionSet& E);

/// Independent second route for the cumulant transform of H(E): the
/// uncompensated kernel integral lambda * int (1/(1-zx) - 1) nu_B(dx),
/// evaluated by direct quadrature rather than through the triplet.
Complex h_cumulant_direct(const FcrmModel& m, const RegionSet& E, Complex z);

struct AdditivityReport {
  bool ok = false;
  bool disjoint = false;
  CharTriplet union_law;
  CharTriplet sum_law;
  std::vector<std::string> messages;
};

/// Checks that g_law over the union of disjoint parts equals the triplet sum
/// of the per-part laws (up to atom-merge normalization and 1e-9 relative
/// tolerance on region masses). Throws on non-disjoint parts.
AdditivityReport check_additivity(const FcrmModel& m, std::span<const RegionSet> parts);

}  // namespace fcrm
