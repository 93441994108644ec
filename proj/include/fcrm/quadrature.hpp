#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace fcrm {

using Complex = std::complex<double>;

/// Raised when an adaptive numerical routine cannot reach its target
/// accuracy. Carries the best estimate produced and the error bound that
/// was actually achieved.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, Complex estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  Complex estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  Complex estimate_;
  double error_bound_;
};

struct QuadratureResult {
  Complex value{0.0, 0.0};
  double error = 0.0;  // estimated absolute error
  long evaluations = 0;
  bool converged = true;

  QuadratureResult& operator+=(const QuadratureResult& other) {
    value += other.value;
    error += other.error;
    evaluations += other.evaluations;
    converged = converged && other.converged;
    return *this;
  }
};

using Integrand = std::function<Complex(double)>;

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over [a, b].
/// Bisects panels until the local K15-G7 discrepancy meets the (halved per
/// split) absolute tolerance or max_depth levels are exhausted; in the
/// latter case the result is returned with converged = false.
QuadratureResult integrate_gk(const Integrand& f, double a, double b, double abs_tol,
                              int max_depth = 20);

/// integrate_gk, but throws NumericalError when the tolerance was not met.
Complex integrate_gk_or_throw(const Integrand& f, double a, double b, double abs_tol,
                              int max_depth = 20);

/// Integral of f over [start, +inf) by geometrically growing panels.
/// The integrand must eventually decay; once consecutive panel values fall
/// off geometrically the remaining tail is completed analytically from the
/// observed ratio. Gives up (converged = false) after max_panels.
QuadratureResult integrate_gk_halfline_up(const Integrand& f, double start, double abs_tol,
                                          double first_width = 1.0, int max_panels = 64);

/// Integral of f over (-inf, end] by geometrically growing panels toward
/// -inf, with the same geometric tail completion.
QuadratureResult integrate_gk_halfline_down(const Integrand& f, double end, double abs_tol,
                                            double first_width = 1.0, int max_panels = 64);

}  // namespace fcrm
