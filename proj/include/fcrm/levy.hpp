#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace fcrm {

enum class Side { Positive, Negative };
enum class TripletKind { Classical, Free };

inline double side_sign(Side s) { return s == Side::Positive ? 1.0 : -1.0; }

/// Constant density `height` on [lo, hi].
struct UniformDensity {
  double lo = 0.0;
  double hi = 1.0;
  double height = 1.0;
};

/// Density scale * exp(-rate * |x|) on the chosen half line.
struct ExponentialDensity {
  double rate = 1.0;
  double scale = 1.0;
  Side side = Side::Positive;
};

/// Density c * |x|^(-1-p) on 0 < |x| < cutoff on the chosen half line.
/// cutoff may be +inf. Levy integrability requires 0 < p < 2.
struct PowerDensity {
  double p = 0.5;
  double c = 1.0;
  double cutoff = 1.0;
  Side side = Side::Positive;
};

/// Piecewise-linear density through (nodes[i], values[i]); zero outside.
struct TabulatedDensity {
  std::vector<double> nodes;
  std::vector<double> values;
};

struct DensityComponent {
  std::variant<UniformDensity, ExponentialDensity, PowerDensity, TabulatedDensity> shape;

  DensityComponent() = default;
  DensityComponent(UniformDensity d) : shape(d) {}
  DensityComponent(ExponentialDensity d) : shape(d) {}
  DensityComponent(PowerDensity d) : shape(d) {}
  DensityComponent(TabulatedDensity d) : shape(std::move(d)) {}

  double value_at(double x) const;
  /// Support as [lo, hi]; ends may be +-inf. Power components exclude 0.
  std::pair<double, double> support() const;
  /// Same shape with the linear amplitude (height/scale/c/values) scaled.
  DensityComponent scaled(double factor) const;
};

struct LevyAtom {
  double location = 0.0;
  double weight = 0.0;
};

/// A Levy measure carried as finitely many atoms plus density components.
struct LevyMeasure {
  std::vector<LevyAtom> atoms;
  std::vector<DensityComponent> densities;

  bool empty() const { return atoms.empty() && densities.empty(); }

  static LevyMeasure point_mass(double location, double weight) {
    LevyMeasure nu;
    nu.atoms.push_back({location, weight});
    return nu;
  }
};

struct ValidationReport {
  bool ok = false;
  double min_x2_integral = std::numeric_limits<double>::quiet_NaN();
  double small_jump_abs_mean = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> messages;
};

/// Characteristic triplet (a, eta, nu) of an infinitely divisible law,
/// classical or free. Both worlds share the |x| <= 1 compensator.
struct CharTriplet {
  double a = 0.0;
  double eta = 0.0;
  LevyMeasure nu;
  TripletKind kind = TripletKind::Free;

  static CharTriplet free_triplet(double a, double eta, LevyMeasure nu = {}) {
    return {a, eta, std::move(nu), TripletKind::Free};
  }
  static CharTriplet classical_triplet(double a, double eta, LevyMeasure nu = {}) {
    return {a, eta, std::move(nu), TripletKind::Classical};
  }
};

/// Atom locations closer than this merge when measures are added.
inline constexpr double kAtomMergeTol = 1e-12;

/// Structural checks plus the integral diagnostics: min{x^2,1} quadrature
/// (finite iff the measure is admissible) and the small-jump absolute mean
/// integral over |x| <= 1 (may be +inf; finiteness is a precondition for the
/// Poisson-integral component, not for validity).
ValidationReport validate_levy(const LevyMeasure& nu);

/// Structural problems of a single density component (empty when sound).
std::vector<std::string> density_structural_errors(const DensityComponent& comp);

LevyMeasure add_measures(const LevyMeasure& n1, const LevyMeasure& n2);
LevyMeasure scale_measure(const LevyMeasure& nu, double factor);

/// Componentwise addition of equal-kind triplets; throws
/// std::invalid_argument("mixed kinds") otherwise.
CharTriplet triplet_add(const CharTriplet& t1, const CharTriplet& t2);

/// Convolution with delta_c: drift shift only.
CharTriplet triplet_shift(const CharTriplet& t, double c);

/// Semantic comparison after atom-merge/shape normalization. Amplitudes and
/// scalars compare within `tol` (relative to their magnitude).
bool measures_close(const LevyMeasure& n1, const LevyMeasure& n2, double tol);
bool triplets_close(const CharTriplet& t1, const CharTriplet& t2, double tol);

// --- measure functionals shared across modules -----------------------------

/// Total mass nu(R); +inf for components with a non-integrable origin.
double total_mass(const LevyMeasure& nu);
/// nu({|x| > r}), finite for every r > 0.
double tail_mass(const LevyMeasure& nu, double r);
/// Smallest radius r with nu({|x| > r}) <= tail_bound (0 for empty measures).
double quantile_radius(const LevyMeasure& nu, double tail_bound);
/// Compensator integral over |x| <= 1 of x nu(dx); throws std::domain_error
/// when the small-jump mean diverges.
double compensator_integral(const LevyMeasure& nu);
/// Small-jump absolute mean: integral over |x| <= 1 of |x| nu(dx) (may be inf).
double small_jump_abs_mean(const LevyMeasure& nu);
/// Integral of min{x^2, 1} nu(dx) by quadrature (the admissibility integral).
double min_x2_integral(const LevyMeasure& nu);
/// Moments truncated to |x| <= r: integral of |x|^k over |x| <= r (k = 1, 2).
double truncated_abs_moment(const LevyMeasure& nu, int k, double r);

}  // namespace fcrm
