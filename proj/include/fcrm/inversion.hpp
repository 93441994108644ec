#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcrm/levy.hpp"
#include "fcrm/transforms.hpp"

namespace fcrm {

struct GridSpec {
  double lo = -1.0;
  double hi = 1.0;
  int n = 400;
  double eps = 0.0;    // Stieltjes offset; 0 selects 1e-3 * grid spacing
  int eps_levels = 2;  // Richardson extrapolation depth in the offset

  double spacing() const { return (hi - lo) / static_cast<double>(n - 1); }
  double eps0() const { return eps > 0.0 ? eps : 1e-3 * spacing(); }

  /// Support-heuristic grid: drift +- (2 sqrt(a) + quantile radius of nu +
  /// mass-scaled spread), padded 20%. Validated downstream by the
  /// mass-completeness invariant of recovered tables.
  static GridSpec automatic(const CharTriplet& t, int n = 400);
};

struct SolveDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct DetectedAtom {
  double location = 0.0;
  double mass = 0.0;
};

struct DensityTable {
  std::vector<double> xs;
  std::vector<double> rho;
  double mass_deficit = 0.0;
  std::vector<DetectedAtom> atom_report;
  std::vector<std::string> notes;

  double density_mass() const;  // trapezoid over the grid
  double atom_mass() const;
  double total_mass() const { return density_mass() + atom_mass(); }
  /// CDF including atoms, continuous from the right.
  double cdf(double x) const;
  /// CDF just left of x (atoms at x excluded).
  double cdf_left(double x) const;
};

/// Solves F^{-1}(u) = zeta with F^{-1}(u) = u (1 + C(1/u)) for u in the upper
/// half plane, i.e. computes u = F(zeta); G(zeta) = 1/u. Damped fixed-point
/// iteration on u = zeta - phi(u) with a Newton polish.
std::pair<Complex, SolveDiagnostics> solve_F(const CharTriplet& t, Complex zeta);

/// Voiculescu transform phi(u) = u * C(1/u) for u in the upper half plane.
Complex voiculescu_phi(const CharTriplet& t, Complex u);

/// Stieltjes recovery of the law of a free triplet: rho(x) from the
/// extrapolated boundary values of -Im G(x + i eps)/pi, with atom detection.
DensityTable free_density(const CharTriplet& t, const GridSpec& g);

/// Fourier recovery of the law of a classical triplet; purely atomic
/// compound-Poisson laws take the exact lattice path instead of a transform.
DensityTable classical_density(const CharTriplet& t, const GridSpec& g);

/// Kolmogorov-Smirnov distance between the table's CDF and the empirical CDF
/// of an ascending sample vector.
double ks_between(const DensityTable& table, std::span<const double> sorted_samples);

/// Table as a normalized concrete law (mass rescaled to exactly 1).
ConcreteLaw to_concrete_law(const DensityTable& table);

}  // namespace fcrm
