#include "fcrm/measure_integral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fcrm {

namespace {

// Breakpoints relevant to a bounded window [a, b]: compensator kinks at
// +-1, the origin, and caller-specified abscissae.
std::vector<double> window_breaks(double a, double b, std::span<const double> extra) {
  std::vector<double> pts;
  for (double candidate : {-1.0, 0.0, 1.0}) {
    if (candidate > a && candidate < b) pts.push_back(candidate);
  }
  for (double candidate : extra) {
    if (std::isfinite(candidate) && candidate > a && candidate < b) pts.push_back(candidate);
  }
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

QuadratureResult piecewise_gk(const Integrand& g, double a, double b, double abs_tol,
                              std::span<const double> extra) {
  const std::vector<double> pts = window_breaks(a, b, extra);
  QuadratureResult out;
  const double tol_piece = abs_tol / static_cast<double>(pts.size() - 1);
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    out += integrate_gk(g, pts[i], pts[i + 1], tol_piece);
  }
  return out;
}

QuadratureResult integrate_uniform(const UniformDensity& d, const Integrand& f, double abs_tol,
                                   std::span<const double> extra) {
  const double h = d.height;
  return piecewise_gk([&](double x) { return h * f(x); }, d.lo, d.hi, abs_tol, extra);
}

QuadratureResult integrate_tabulated(const TabulatedDensity& d, const Integrand& f,
                                     double abs_tol, std::span<const double> extra) {
  QuadratureResult out;
  if (d.nodes.size() < 2) return out;
  const double tol_piece = abs_tol / static_cast<double>(d.nodes.size() - 1);
  for (size_t i = 0; i + 1 < d.nodes.size(); ++i) {
    const double x0 = d.nodes[i], x1 = d.nodes[i + 1];
    const double v0 = d.values[i], v1 = d.values[i + 1];
    const double slope = (v1 - v0) / (x1 - x0);
    auto g = [&, x0, v0, slope](double x) { return (v0 + slope * (x - x0)) * f(x); };
    out += piecewise_gk(g, x0, x1, tol_piece, extra);
  }
  return out;
}

// Exponential component on the positive side; the caller mirrors negatives.
QuadratureResult integrate_exponential_pos(const ExponentialDensity& d, const Integrand& f,
                                           double abs_tol, std::span<const double> extra) {
  auto g = [&](double x) { return d.scale * std::exp(-d.rate * x) * f(x); };
  double finite_end = 1.0;
  for (double candidate : extra) {
    if (std::isfinite(candidate) && candidate > finite_end) finite_end = candidate + 1.0;
  }
  QuadratureResult out = piecewise_gk(g, 0.0, finite_end, 0.5 * abs_tol, extra);
  out += integrate_gk_halfline_up(g, finite_end, 0.5 * abs_tol, std::max(1.0, 2.0 / d.rate));
  return out;
}

// Power component on the positive side, in log coordinates around the
// origin: with x = e^t the measure c x^{-1-p} dx becomes c e^{-pt} dt.
QuadratureResult integrate_power_pos(const PowerDensity& d, const Integrand& f, double abs_tol,
                                     std::span<const double> extra) {
  const double p = d.p, c = d.c;
  auto g = [&, p, c](double t) {
    const double x = std::exp(t);
    return c * std::exp(-p * t) * f(x);
  };
  std::vector<double> t_breaks;
  for (double candidate : extra) {
    if (std::isfinite(candidate) && candidate > 0.0 && candidate < d.cutoff) {
      t_breaks.push_back(std::log(candidate));
    }
  }
  std::sort(t_breaks.begin(), t_breaks.end());

  QuadratureResult out;
  const double near_end = std::log(std::min(d.cutoff, 1.0));

  // (0, min(cutoff, 1)]: piecewise between breakpoints, then extend to -inf.
  {
    std::vector<double> pts;
    for (double t : t_breaks) {
      if (t < near_end) pts.push_back(t);
    }
    pts.push_back(near_end);
    const double tol_piece = 0.5 * abs_tol / static_cast<double>(pts.size());
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      out += integrate_gk(g, pts[i], pts[i + 1], tol_piece);
    }
    out += integrate_gk_halfline_down(g, pts.front(), tol_piece);
  }

  // (1, cutoff), when present, still in log coordinates.
  if (d.cutoff > 1.0) {
    std::vector<double> pts{0.0};
    for (double t : t_breaks) {
      if (t > 0.0) pts.push_back(t);
    }
    std::sort(pts.begin(), pts.end());
    const double tol_piece = 0.5 * abs_tol / static_cast<double>(pts.size());
    if (std::isfinite(d.cutoff)) {
      pts.push_back(std::log(d.cutoff));
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        out += integrate_gk(g, pts[i], pts[i + 1], tol_piece);
      }
    } else {
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        out += integrate_gk(g, pts[i], pts[i + 1], tol_piece);
      }
      out += integrate_gk_halfline_up(g, pts.back(), tol_piece);
    }
  }
  return out;
}

std::vector<double> mirrored(std::span<const double> extra) {
  std::vector<double> out(extra.begin(), extra.end());
  for (double& x : out) x = -x;
  return out;
}

}  // namespace

QuadratureResult integrate_component(const DensityComponent& comp, const Integrand& f,
                                     double abs_tol, std::span<const double> extra) {
  return std::visit(
      [&](const auto& d) -> QuadratureResult {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return integrate_uniform(d, f, abs_tol, extra);
        } else if constexpr (std::is_same_v<T, TabulatedDensity>) {
          return integrate_tabulated(d, f, abs_tol, extra);
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          if (d.side == Side::Positive) return integrate_exponential_pos(d, f, abs_tol, extra);
          ExponentialDensity flipped = d;
          flipped.side = Side::Positive;
          const std::vector<double> ex = mirrored(extra);
          return integrate_exponential_pos(flipped, [&](double x) { return f(-x); }, abs_tol, ex);
        } else {
          if (d.side == Side::Positive) return integrate_power_pos(d, f, abs_tol, extra);
          PowerDensity flipped = d;
          flipped.side = Side::Positive;
          const std::vector<double> ex = mirrored(extra);
          return integrate_power_pos(flipped, [&](double x) { return f(-x); }, abs_tol, ex);
        }
      },
      comp.shape);
}

Complex integrate_against(const LevyMeasure& nu, const Integrand& f, double abs_tol,
                          std::span<const double> extra) {
  Complex total{0.0, 0.0};
  for (const LevyAtom& atom : nu.atoms) {
    total += atom.weight * f(atom.location);
  }
  if (nu.densities.empty()) return total;
  QuadratureResult acc;
  const double tol_comp = abs_tol / static_cast<double>(nu.densities.size());
  for (const DensityComponent& comp : nu.densities) {
    acc += integrate_component(comp, f, tol_comp, extra);
  }
  if (!acc.converged) {
    throw NumericalError("Levy-measure integral did not meet its tolerance",
                         total + acc.value, acc.error);
  }
  return total + acc.value;
}

double integrate_against_real(const LevyMeasure& nu, const std::function<double(double)>& f,
                              double abs_tol) {
  return integrate_against(nu, [&](double x) { return Complex(f(x), 0.0); }, abs_tol).real();
}

}  // namespace fcrm
