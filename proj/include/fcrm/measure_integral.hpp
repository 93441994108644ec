#pragma once

#include <span>

#include "fcrm/levy.hpp"
#include "fcrm/quadrature.hpp"

namespace fcrm {

/// Integral of f against a single density component. Splits at {-1, 0, 1},
/// at the caller's extra breakpoints (near-pole abscissae and the like), and
/// integrates power components in log coordinates around the origin, with
/// geometric tail completion on unbounded ends.
QuadratureResult integrate_component(const DensityComponent& comp, const Integrand& f,
                                     double abs_tol,
                                     std::span<const double> extra_breakpoints = {});

/// Integral of f against the whole measure: atoms summed exactly, densities
/// by integrate_component. Throws NumericalError (estimate + bound attached)
/// when the requested tolerance cannot be met.
Complex integrate_against(const LevyMeasure& nu, const Integrand& f, double abs_tol,
                          std::span<const double> extra_breakpoints = {});

/// Real-valued convenience wrapper.
double integrate_against_real(const LevyMeasure& nu, const std::function<double(double)>& f,
                              double abs_tol);

}  // namespace fcrm
