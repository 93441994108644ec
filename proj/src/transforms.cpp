#include "fcrm/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fcrm/measure_integral.hpp"

namespace fcrm {

namespace {

constexpr double kTol = 1e-10;
constexpr Complex kI{0.0, 1.0};

bool has_divergent_small_jumps(const LevyMeasure& nu) {
  for (const DensityComponent& comp : nu.densities) {
    if (const auto* pw = std::get_if<PowerDensity>(&comp.shape)) {
      if (pw->p >= 1.0) return true;
    }
  }
  return false;
}

// Breakpoints shadowing the near-pole of 1/(1 - xz) at x = 1/z.
std::vector<double> pole_breaks(Complex z) {
  const Complex inv = 1.0 / z;
  const double xp = inv.real();
  const double w = std::abs(inv.imag());
  if (!std::isfinite(xp) || !std::isfinite(w)) return {};
  return {xp - 10.0 * w, xp - w, xp, xp + w, xp + 10.0 * w};
}

// --- oscillatory closed forms for the classical kernels ---------------------

// integral of e^{irx} over [a, b]
Complex osc_m0(double r, double a, double b) {
  if (r == 0.0) return {b - a, 0.0};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  return std::exp(kI * (r * mid)) * (2.0 * std::sin(r * half) / r);
}

// integral of (x - mid) e^{irx} over [a, b]
Complex osc_m1(double r, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  if (r == 0.0) return {0.0, 0.0};
  const double u = r * half;
  double core;  // sin u - u cos u, guarded against cancellation for small u
  if (std::abs(u) < 1e-4) {
    core = u * u * u / 3.0 * (1.0 - u * u / 10.0);
  } else {
    core = std::sin(u) - u * std::cos(u);
  }
  return std::exp(kI * (r * mid)) * (2.0 * kI.imag() * Complex{0.0, core / (r * r)});
}

// integral of (A + B x) e^{irx} over [a, b]
Complex osc_linear(double r, double a, double b, double A, double B) {
  const double mid = 0.5 * (a + b);
  return (A + B * mid) * osc_m0(r, a, b) + B * osc_m1(r, a, b);
}

// integral of x w(x) over [a,b] cap [-1,1] for a linear weight A + Bx
double clipped_x_moment_linear(double a, double b, double A, double B) {
  const double lo = std::max(a, -1.0), hi = std::min(b, 1.0);
  if (hi <= lo) return 0.0;
  auto prim = [&](double x) { return A * x * x / 2.0 + B * x * x * x / 3.0; };
  return prim(hi) - prim(lo);
}

// integral over [0, b] of x e^{-rate x}
double exp_x_moment(double rate, double b) {
  const double eb = std::isfinite(b) ? std::exp(-rate * b) : 0.0;
  return (1.0 - eb * (1.0 + rate * b)) / (rate * rate);
}

// e^{irx} tail integral of the power density: for xi > 0, r >= 0,
//   integral over [xi, cutoff) of e^{irx} c x^{-1-p} dx
// via the vertical contour x = xi + iy, where the integrand becomes
// smooth and monotonically decaying (no oscillation left).
Complex power_osc_tail(double r, double p, double c, double xi, double cutoff, double tol) {
  auto vertical = [&](double base) -> Complex {
    auto g = [&, base](double y) -> Complex {
      return std::exp(-r * y) * c * std::pow(Complex{base, y}, -1.0 - p);
    };
    QuadratureResult q = integrate_gk(g, 0.0, 1.0, 0.5 * tol);
    q += integrate_gk_halfline_up(g, 1.0, 0.5 * tol, 2.0);
    if (!q.converged) {
      throw NumericalError("power tail contour integral did not converge", q.value, q.error);
    }
    return kI * std::exp(kI * (r * base)) * q.value;
  };
  Complex out = vertical(xi);
  if (std::isfinite(cutoff)) out -= vertical(cutoff);
  return out;
}

// Classical kernel against one density component:
//   integral of (e^{irx} - 1 - irx 1_{|x|<=1 and compensated}) w(x) dx.
Complex classical_component(const DensityComponent& comp, double r, bool compensated,
                            double tol) {
  return std::visit(
      [&](const auto& d) -> Complex {
        using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          Complex out = d.height * osc_m0(r, d.lo, d.hi);
          out -= d.height * (d.hi - d.lo);
          if (compensated) {
            out -= kI * r * d.height * clipped_x_moment_linear(d.lo, d.hi, 0.0, 1.0);
          }
          return out;
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          const double sgn = side_sign(d.side);
          // On the negative side substitute x -> -x.
          const double reff = sgn * r;
          Complex out = d.scale / Complex{d.rate, -reff} - d.scale / d.rate;
          if (compensated) {
            out -= kI * r * sgn * d.scale * exp_x_moment(d.rate, 1.0);
          }
          return out;
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          const double sgn = side_sign(d.side);
          const double reff = sgn * r;  // mirrored frequency on the negative side
          const double p = d.p, c = d.c;
          const double m = std::min(d.cutoff, 1.0);
          Complex out{0.0, 0.0};
          // Near part (0, m] in log coordinates; the integrand vanishes like
          // x^2 (compensated) or x (uncompensated) at the origin.
          {
            auto g = [&](double t) -> Complex {
              const double x = std::exp(t);
              Complex val = std::exp(kI * (reff * x)) - 1.0;
              if (compensated) val -= kI * (reff * x);
              return val * c * std::exp(-p * t);
            };
            const double t_end = std::log(m);
            const double abs_r = std::abs(reff);
            // Unit panels across the oscillatory stretch r e^t > 1/2.
            double t_osc = abs_r > 0.5 ? -std::log(2.0 * abs_r) : t_end;
            t_osc = std::min(t_osc, t_end);
            QuadratureResult q;
            double t = t_end;
            while (t > t_osc) {
              const double lo = std::max(t - 1.0, t_osc);
              q += integrate_gk(g, lo, t, 0.25 * tol / std::max(1.0, t_end - t_osc));
              t = lo;
            }
            q += integrate_gk_halfline_down(g, t, 0.25 * tol);
            if (!q.converged) {
              throw NumericalError("power near-origin integral did not converge", q.value,
                                   q.error);
            }
            out += q.value;
          }
          // Tail (1, cutoff): e^{irx} part by contour, constant part closed.
          if (d.cutoff > 1.0) {
            const double tail_mass =
                c / p * (1.0 - (std::isfinite(d.cutoff) ? std::pow(d.cutoff, -p) : 0.0));
            Complex osc;
            if (reff >= 0.0) {
              osc = power_osc_tail(reff, p, c, 1.0, d.cutoff, 0.25 * tol);
            } else {
              osc = std::conj(power_osc_tail(-reff, p, c, 1.0, d.cutoff, 0.25 * tol));
            }
            out += osc - tail_mass;
          }
          return out;
        } else {
          Complex out{0.0, 0.0};
          for (size_t i = 0; i + 1 < d.nodes.size(); ++i) {
            const double a = d.nodes[i], b = d.nodes[i + 1];
            const double va = d.values[i];
            const double slope = (d.values[i + 1] - va) / (b - a);
            const double A = va - slope * a;  // w(x) = A + B x
            const double B = slope;
            out += osc_linear(r, a, b, A, B);
            out -= 0.5 * (d.values[i] + d.values[i + 1]) * (b - a);
            if (compensated) {
              out -= kI * r * clipped_x_moment_linear(a, b, A, B);
            }
          }
          return out;
        }
      },
      comp.shape);
}

Complex classical_measure_integral(const LevyMeasure& nu, double r, bool compensated) {
  Complex out{0.0, 0.0};
  for (const LevyAtom& atom : nu.atoms) {
    Complex val = std::exp(kI * (r * atom.location)) - 1.0;
    if (compensated && std::abs(atom.location) <= 1.0) val -= kI * (r * atom.location);
    out += atom.weight * val;
  }
  if (nu.densities.empty()) return out;
  const double tol_comp = kTol / static_cast<double>(nu.densities.size());
  for (const DensityComponent& comp : nu.densities) {
    out += classical_component(comp, r, compensated, tol_comp);
  }
  return out;
}

}  // namespace

double ConcreteLaw::total_mass() const {
  double mass = 0.0;
  for (const LevyAtom& atom : atoms) mass += atom.weight;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    mass += 0.5 * (rho[i] + rho[i + 1]) * (xs[i + 1] - xs[i]);
  }
  return mass;
}

Complex cauchy_transform(const ConcreteLaw& mu, Complex z) {
  if (!(z.imag() > 0.0)) {
    throw std::domain_error("cauchy_transform requires Im z > 0");
  }
  const double mass = mu.total_mass();
  if (std::abs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("law mass must be 1 within 1e-9");
  }
  Complex out{0.0, 0.0};
  for (const LevyAtom& atom : mu.atoms) out += atom.weight / (z - atom.location);
  for (size_t i = 0; i + 1 < mu.xs.size(); ++i) {
    const Complex fa = mu.rho[i] / (z - mu.xs[i]);
    const Complex fb = mu.rho[i + 1] / (z - mu.xs[i + 1]);
    out += 0.5 * (fa + fb) * (mu.xs[i + 1] - mu.xs[i]);
  }
  return out;
}

Complex free_cumulant_transform(const CharTriplet& t, Complex z) {
  if (t.kind != TripletKind::Free) {
    throw std::invalid_argument("free_cumulant_transform needs a FREE triplet");
  }
  if (!(z.imag() < 0.0)) {
    throw std::domain_error("free_cumulant_transform requires Im z < 0");
  }
  Complex out = t.eta * z + t.a * z * z;
  if (t.nu.empty()) return out;
  auto f = [z](double x) -> Complex {
    const Complex u = x * z;
    const Complex denom = 1.0 - u;
    if (std::abs(x) <= 1.0) {
      return u * u / denom;  // 1/(1-u) - 1 - u, exactly
    }
    return u / denom;  // 1/(1-u) - 1
  };
  const std::vector<double> breaks = pole_breaks(z);
  out += integrate_against(t.nu, f, kTol, breaks);
  return out;
}

Complex classical_exponent(const CharTriplet& t, double r) {
  if (t.kind != TripletKind::Classical) {
    throw std::invalid_argument("classical_exponent needs a CLASSICAL triplet");
  }
  Complex out = kI * (t.eta * r);
  out -= 0.5 * t.a * r * r;
  out += classical_measure_integral(t.nu, r, /*compensated=*/true);
  return out;
}

Complex drift_cumulant_transform(double nuE_mass, const LevyMeasure& nuB, double r) {
  if (nuE_mass < 0.0) throw std::invalid_argument("intensity mass must be nonnegative");
  if (nuE_mass == 0.0) return {0.0, 0.0};
  if (has_divergent_small_jumps(nuB)) {
    throw std::domain_error(
        "drift-type cumulant transform needs an integrable small-jump mean: "
        "the |x| <= 1 absolute mean of the jump measure must be finite");
  }
  return nuE_mass * classical_measure_integral(nuB, r, /*compensated=*/false);
}

Complex free_compound_kernel(double lambda, const LevyMeasure& nuB, Complex z) {
  if (!(z.imag() < 0.0)) {
    throw std::domain_error("free compound kernel requires Im z < 0");
  }
  if (lambda < 0.0) throw std::invalid_argument("rate must be nonnegative");
  if (lambda == 0.0 || nuB.empty()) return {0.0, 0.0};
  if (has_divergent_small_jumps(nuB)) {
    throw std::domain_error(
        "free compound kernel needs an integrable small-jump mean of the jump measure");
  }
  auto f = [z](double x) -> Complex {
    const Complex u = x * z;
    return u / (1.0 - u);
  };
  const std::vector<double> breaks = pole_breaks(z);
  return lambda * integrate_against(nuB, f, kTol, breaks);
}

}  // namespace fcrm
