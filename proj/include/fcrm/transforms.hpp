#pragma once

#include "fcrm/levy.hpp"
#include "fcrm/quadrature.hpp"

namespace fcrm {

/// A concrete probability law: point masses plus an optional tabulated
/// density (piecewise linear through (xs, rho)). Total mass must be 1 within
/// 1e-9 for transform evaluation.
struct ConcreteLaw {
  std::vector<LevyAtom> atoms;  // (location, mass)
  std::vector<double> xs;
  std::vector<double> rho;

  double total_mass() const;
};

/// G(z) = integral of 1/(z - t) d mu(t) for Im z > 0; atoms are summed
/// exactly, the density table by trapezoidal quadrature. Im of the result is
/// negative for every genuine law.
Complex cauchy_transform(const ConcreteLaw& mu, Complex z);

/// Free cumulant transform of a free triplet at z in the lower half plane:
///   C(z) = eta z + a z^2 + integral of (1/(1-xz) - 1 - xz 1_{|x|<=1}) d nu.
Complex free_cumulant_transform(const CharTriplet& t, Complex z);

/// Classical Levy-Khintchine exponent at frequency r:
///   psi(r) = i eta r - a r^2 / 2 + integral of (e^{irx} - 1 - irx 1_{|x|<=1}) d nu;
/// the characteristic function is exp(psi(r)).
Complex classical_exponent(const CharTriplet& t, double r);

/// Drift-type classical cumulant transform of a Poisson integral with
/// intensity nuE_mass x nuB: nuE_mass * integral of (e^{irx} - 1) d nuB.
/// Requires a finite small-jump absolute mean of nuB.
Complex drift_cumulant_transform(double nuE_mass, const LevyMeasure& nuB, double r);

/// Uncompensated free compound-Poisson kernel,
///   lambda * integral of (1/(1-zx) - 1) d nuB,
/// evaluated by direct quadrature. This is the independent second route for
/// the Poisson-integral component law and requires the same finite
/// small-jump mean as the drift-type transform.
Complex free_compound_kernel(double lambda, const LevyMeasure& nuB, Complex z);

}  // namespace fcrm
