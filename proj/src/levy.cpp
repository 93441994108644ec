#include "fcrm/levy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fcrm/measure_integral.hpp"

namespace fcrm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_lo(double x, double lo) { return std::max(x, lo); }

// integral of x^k over [a, b], a <= b
double poly_moment(double a, double b, int k) {
  const double kk = static_cast<double>(k + 1);
  return (std::pow(b, k + 1) - std::pow(a, k + 1)) / kk;
}

// integral of x^k * e^(-r x) over [0, b] (b may be inf), k in {0, 1, 2}
double exp_moment(double r, double b, int k) {
  const double eb = std::isfinite(b) ? std::exp(-r * b) : 0.0;
  switch (k) {
    case 0:
      return (1.0 - eb) / r;
    case 1:
      return (1.0 - eb * (1.0 + r * b)) / (r * r);
    default:
      return (2.0 - eb * (2.0 + 2.0 * r * b + r * r * b * b)) / (r * r * r);
  }
}

struct StructuralCheck {
  bool ok = true;
  std::vector<std::string> messages;

  void fail(std::string msg) {
    ok = false;
    messages.push_back(std::move(msg));
  }
};

StructuralCheck check_structure(const LevyMeasure& nu) {
  StructuralCheck s;
  for (const LevyAtom& atom : nu.atoms) {
    if (std::abs(atom.location) < kAtomMergeTol) s.fail("atom at zero");
    if (!(atom.weight > 0.0)) s.fail("nonpositive atom weight");
    if (!std::isfinite(atom.location) || !std::isfinite(atom.weight)) {
      s.fail("non-finite atom");
    }
  }
  std::vector<double> locs;
  for (const LevyAtom& atom : nu.atoms) locs.push_back(atom.location);
  std::sort(locs.begin(), locs.end());
  for (size_t i = 0; i + 1 < locs.size(); ++i) {
    if (locs[i + 1] - locs[i] < kAtomMergeTol) s.fail("duplicate atom locations");
  }
  for (const DensityComponent& comp : nu.densities) {
    for (std::string& msg : density_structural_errors(comp)) s.fail(std::move(msg));
  }
  return s;
}

// True when the small-jump absolute mean of the component diverges (power
// components with p >= 1 have a non-integrable |x| near the origin).
bool small_jump_divergent(const DensityComponent& comp) {
  if (const auto* pw = std::get_if<PowerDensity>(&comp.shape)) return pw->p >= 1.0;
  return false;
}

}  // namespace

std::vector<std::string> density_structural_errors(const DensityComponent& comp) {
  std::vector<std::string> errors;
  auto fail = [&errors](std::string msg) { errors.push_back(std::move(msg)); };
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          if (!(d.lo < d.hi)) fail("uniform bounds must satisfy lo < hi");
          if (!(d.height > 0.0)) fail("uniform height must be positive");
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          if (!(d.rate > 0.0)) fail("exponential rate must be positive");
          if (!(d.scale > 0.0)) fail("exponential scale must be positive");
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          if (!(d.p > 0.0 && d.p < 2.0)) {
            fail("power exponent must lie in (0,2) for Levy integrability");
          }
          if (!(d.c > 0.0)) fail("power amplitude must be positive");
          if (!(d.cutoff > 0.0)) fail("power cutoff must be positive");
        } else {
          if (d.nodes.size() < 2) fail("tabulated component needs at least 2 nodes");
          if (d.nodes.size() != d.values.size()) fail("tabulated nodes/values sizes differ");
          for (size_t i = 0; i + 1 < d.nodes.size(); ++i) {
            if (!(d.nodes[i] < d.nodes[i + 1])) {
              fail("tabulated nodes must be strictly increasing");
              break;
            }
          }
          for (double x : d.nodes) {
            if (std::abs(x) < kAtomMergeTol) fail("tabulated node at zero");
          }
          for (double v : d.values) {
            if (v < 0.0) {
              fail("tabulated values must be nonnegative");
              break;
            }
          }
        }
      },
      comp.shape);
  return errors;
}

double DensityComponent::value_at(double x) const {
  return std::visit(
      [x](const auto& d) -> double {
        using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return (x >= d.lo && x <= d.hi) ? d.height : 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          const double y = side_sign(d.side) * x;
          return y > 0.0 ? d.scale * std::exp(-d.rate * y) : 0.0;
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          const double y = side_sign(d.side) * x;
          return (y > 0.0 && y < d.cutoff) ? d.c * std::pow(y, -1.0 - d.p) : 0.0;
        } else {
          if (d.nodes.size() < 2 || x < d.nodes.front() || x > d.nodes.back()) return 0.0;
          const auto it = std::upper_bound(d.nodes.begin(), d.nodes.end(), x);
          const size_t j = std::min<size_t>(d.nodes.size() - 1,
                                            static_cast<size_t>(it - d.nodes.begin()));
          const size_t i = j == 0 ? 0 : j - 1;
          if (i == j) return d.values[i];
          const double w = (x - d.nodes[i]) / (d.nodes[j] - d.nodes[i]);
          return d.values[i] + w * (d.values[j] - d.values[i]);
        }
      },
      shape);
}

std::pair<double, double> DensityComponent::support() const {
  return std::visit(
      [](const auto& d) -> std::pair<double, double> {
        using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return {d.lo, d.hi};
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          return d.side == Side::Positive ? std::pair{0.0, kInf} : std::pair{-kInf, 0.0};
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          return d.side == Side::Positive ? std::pair{0.0, d.cutoff}
                                          : std::pair{-d.cutoff, 0.0};
        } else {
          if (d.nodes.empty()) return {0.0, 0.0};
          return {d.nodes.front(), d.nodes.back()};
        }
      },
      shape);
}

DensityComponent DensityComponent::scaled(double factor) const {
  DensityComponent out = *this;
  std::visit(
      [factor](auto& d) {
        using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          d.height *= factor;
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          d.scale *= factor;
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          d.c *= factor;
        } else {
          for (double& v : d.values) v *= factor;
        }
      },
      out.shape);
  return out;
}

ValidationReport validate_levy(const LevyMeasure& nu) {
  ValidationReport report;
  const StructuralCheck s = check_structure(nu);
  report.messages = s.messages;
  if (!s.ok) {
    report.ok = false;
    return report;
  }

  report.min_x2_integral = min_x2_integral(nu);
  report.small_jump_abs_mean = small_jump_abs_mean(nu);
  report.ok = std::isfinite(report.min_x2_integral);
  if (!report.ok) report.messages.push_back("min{x^2,1} integral is not finite");
  return report;
}

LevyMeasure add_measures(const LevyMeasure& n1, const LevyMeasure& n2) {
  LevyMeasure out;
  out.atoms = n1.atoms;
  for (const LevyAtom& atom : n2.atoms) {
    bool merged = false;
    for (LevyAtom& existing : out.atoms) {
      if (std::abs(existing.location - atom.location) <= kAtomMergeTol) {
        existing.weight += atom.weight;
        merged = true;
        break;
      }
    }
    if (!merged) out.atoms.push_back(atom);
  }
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const LevyAtom& a, const LevyAtom& b) { return a.location < b.location; });
  out.densities = n1.densities;
  out.densities.insert(out.densities.end(), n2.densities.begin(), n2.densities.end());
  return out;
}

LevyMeasure scale_measure(const LevyMeasure& nu, double factor) {
  if (factor < 0.0) throw std::invalid_argument("measure scale factor must be nonnegative");
  LevyMeasure out;
  if (factor == 0.0) return out;
  out.atoms = nu.atoms;
  for (LevyAtom& atom : out.atoms) atom.weight *= factor;
  out.densities.reserve(nu.densities.size());
  for (const DensityComponent& comp : nu.densities) out.densities.push_back(comp.scaled(factor));
  return out;
}

CharTriplet triplet_add(const CharTriplet& t1, const CharTriplet& t2) {
  if (t1.kind != t2.kind) throw std::invalid_argument("mixed kinds");
  CharTriplet out;
  out.a = t1.a + t2.a;
  out.eta = t1.eta + t2.eta;
  out.nu = add_measures(t1.nu, t2.nu);
  out.kind = t1.kind;
  return out;
}

CharTriplet triplet_shift(const CharTriplet& t, double c) {
  CharTriplet out = t;
  out.eta += c;
  return out;
}

namespace {

// Normal form of the density list: amplitudes grouped by shape so that
// lambda1*nu + lambda2*nu compares equal to (lambda1+lambda2)*nu.
struct ShapeKey {
  int family;
  int side;
  std::vector<double> params;

  bool operator<(const ShapeKey& other) const {
    if (family != other.family) return family < other.family;
    if (side != other.side) return side < other.side;
    return params < other.params;
  }
};

using AmplitudeMap = std::map<ShapeKey, std::vector<double>>;

AmplitudeMap amplitude_normal_form(const LevyMeasure& nu) {
  AmplitudeMap m;
  for (const DensityComponent& comp : nu.densities) {
    ShapeKey key{};
    std::vector<double> amp;
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
          if constexpr (std::is_same_v<T, UniformDensity>) {
            key = {0, 0, {d.lo, d.hi}};
            amp = {d.height};
          } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
            key = {1, d.side == Side::Positive ? 0 : 1, {d.rate}};
            amp = {d.scale};
          } else if constexpr (std::is_same_v<T, PowerDensity>) {
            key = {2, d.side == Side::Positive ? 0 : 1, {d.p, d.cutoff}};
            amp = {d.c};
          } else {
            key = {3, 0, d.nodes};
            amp = d.values;
          }
        },
        comp.shape);
    auto [it, inserted] = m.emplace(std::move(key), amp);
    if (!inserted) {
      for (size_t i = 0; i < amp.size() && i < it->second.size(); ++i) it->second[i] += amp[i];
    }
  }
  return m;
}

bool scalar_close(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

std::vector<LevyAtom> merged_atoms(const LevyMeasure& nu) {
  LevyMeasure tmp;
  return add_measures(tmp, nu).atoms;
}

}  // namespace

bool measures_close(const LevyMeasure& n1, const LevyMeasure& n2, double tol) {
  const std::vector<LevyAtom> a1 = merged_atoms(n1);
  const std::vector<LevyAtom> a2 = merged_atoms(n2);
  if (a1.size() != a2.size()) return false;
  for (size_t i = 0; i < a1.size(); ++i) {
    if (std::abs(a1[i].location - a2[i].location) > kAtomMergeTol) return false;
    if (!scalar_close(a1[i].weight, a2[i].weight, tol)) return false;
  }
  const AmplitudeMap m1 = amplitude_normal_form(n1);
  const AmplitudeMap m2 = amplitude_normal_form(n2);
  if (m1.size() != m2.size()) return false;
  for (auto it1 = m1.begin(), it2 = m2.begin(); it1 != m1.end(); ++it1, ++it2) {
    if (it2->first < it1->first || it1->first < it2->first) return false;
    if (it1->second.size() != it2->second.size()) return false;
    for (size_t i = 0; i < it1->second.size(); ++i) {
      if (!scalar_close(it1->second[i], it2->second[i], tol)) return false;
    }
  }
  return true;
}

bool triplets_close(const CharTriplet& t1, const CharTriplet& t2, double tol) {
  return t1.kind == t2.kind && scalar_close(t1.a, t2.a, tol) &&
         scalar_close(t1.eta, t2.eta, tol) && measures_close(t1.nu, t2.nu, tol);
}

// --- measure functionals ----------------------------------------------------

double total_mass(const LevyMeasure& nu) {
  double mass = 0.0;
  for (const LevyAtom& atom : nu.atoms) mass += atom.weight;
  for (const DensityComponent& comp : nu.densities) {
    const double m = std::visit(
        [](const auto& d) -> double {
          using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
          if constexpr (std::is_same_v<T, UniformDensity>) {
            return d.height * (d.hi - d.lo);
          } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
            return d.scale / d.rate;
          } else if constexpr (std::is_same_v<T, PowerDensity>) {
            return kInf;  // |x|^(-1-p) is never integrable at the origin
          } else {
            double acc = 0.0;
            for (size_t i = 0; i + 1 < d.nodes.size(); ++i) {
              acc += 0.5 * (d.values[i] + d.values[i + 1]) * (d.nodes[i + 1] - d.nodes[i]);
            }
            return acc;
          }
        },
        comp.shape);
    mass += m;
    if (!std::isfinite(mass)) return kInf;
  }
  return mass;
}

namespace {

// mass of one component outside [-r, r], r > 0
double component_tail_mass(const DensityComponent& comp, double r) {
  return std::visit(
      [r](const auto& d) -> double {
        using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          const double above = std::max(0.0, d.hi - std::max(d.lo, r));
          const double below = std::max(0.0, std::min(d.hi, -r) - d.lo);
          return d.height * (above + below);
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          return d.scale / d.rate * std::exp(-d.rate * r);
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          if (r >= d.cutoff) return 0.0;
          const double hi_term = std::isfinite(d.cutoff) ? std::pow(d.cutoff, -d.p) : 0.0;
          return d.c / d.p * (std::pow(r, -d.p) - hi_term);
        } else {
          double acc = 0.0;
          for (size_t i = 0; i + 1 < d.nodes.size(); ++i) {
            double a = d.nodes[i], b = d.nodes[i + 1];
            const double va = d.values[i], vb = d.values[i + 1];
            auto piece = [&](double lo, double hi) {
              if (hi <= lo) return 0.0;
              auto lerp = [&](double x) { return va + (vb - va) * (x - a) / (b - a); };
              return 0.5 * (lerp(lo) + lerp(hi)) * (hi - lo);
            };
            acc += piece(std::max(a, r), b) + piece(a, std::min(b, -r));
          }
          return acc;
        }
      },
      comp.shape);
}

}  // namespace

double tail_mass(const LevyMeasure& nu, double r) {
  double mass = 0.0;
  for (const LevyAtom& atom : nu.atoms) {
    if (std::abs(atom.location) > r) mass += atom.weight;
  }
  for (const DensityComponent& comp : nu.densities) mass += component_tail_mass(comp, r);
  return mass;
}

double quantile_radius(const LevyMeasure& nu, double tail_bound) {
  if (nu.empty()) return 0.0;
  double hi = 1.0;
  while (tail_mass(nu, hi) > tail_bound) {
    hi *= 2.0;
    if (hi > 1e12) return hi;
  }
  double lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (tail_mass(nu, mid) <= tail_bound) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double small_jump_abs_mean(const LevyMeasure& nu) {
  for (const DensityComponent& comp : nu.densities) {
    if (small_jump_divergent(comp)) return kInf;
  }
  auto f = [](double x) { return std::abs(x) <= 1.0 ? std::abs(x) : 0.0; };
  return integrate_against_real(nu, f, 1e-10);
}

double compensator_integral(const LevyMeasure& nu) {
  for (const DensityComponent& comp : nu.densities) {
    if (small_jump_divergent(comp)) {
      throw std::domain_error(
          "compensator integral needs integrable small jumps: the |x| <= 1 "
          "absolute mean of the measure must be finite");
    }
  }
  auto f = [](double x) { return std::abs(x) <= 1.0 ? x : 0.0; };
  return integrate_against_real(nu, f, 1e-10);
}

double min_x2_integral(const LevyMeasure& nu) {
  auto f = [](double x) { return std::min(x * x, 1.0); };
  return integrate_against_real(nu, f, 1e-10);
}

double truncated_abs_moment(const LevyMeasure& nu, int k, double r) {
  double acc = 0.0;
  for (const LevyAtom& atom : nu.atoms) {
    if (std::abs(atom.location) <= r) acc += atom.weight * std::pow(std::abs(atom.location), k);
  }
  for (const DensityComponent& comp : nu.densities) {
    const double m = std::visit(
        [&](const auto& d) -> double {
          using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
          if constexpr (std::is_same_v<T, UniformDensity>) {
            const double lo = std::max(d.lo, -r), hi = std::min(d.hi, r);
            if (hi <= lo) return 0.0;
            if (lo >= 0.0) return d.height * poly_moment(lo, hi, k);
            if (hi <= 0.0) return d.height * poly_moment(-hi, -lo, k);
            return d.height * (poly_moment(0.0, -lo, k) + poly_moment(0.0, hi, k));
          } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
            return d.scale * exp_moment(d.rate, r, k);
          } else if constexpr (std::is_same_v<T, PowerDensity>) {
            const double b = std::min(r, d.cutoff);
            const double q = static_cast<double>(k) - d.p;
            if (q <= 0.0) return kInf;
            return d.c * std::pow(b, q) / q;
          } else {
            double acc2 = 0.0;
            for (size_t i = 0; i + 1 < d.nodes.size(); ++i) {
              const double a = std::max(d.nodes[i], -r), b = std::min(d.nodes[i + 1], r);
              if (b <= a) continue;
              const double va = d.values[i], vb = d.values[i + 1];
              const double slope = (vb - va) / (d.nodes[i + 1] - d.nodes[i]);
              auto segment = [&](double lo, double hi, double sgn) {
                if (hi <= lo) return 0.0;
                auto prim = [&](double x) {
                  // integral of (va + slope (x - a0)) * (sgn x)^k
                  const double a0 = d.nodes[i];
                  const double c0 = va - slope * a0;
                  const double sk = std::pow(sgn, k);
                  return sk * (c0 * std::pow(x, k + 1) / (k + 1) +
                               slope * std::pow(x, k + 2) / (k + 2));
                };
                return prim(hi) - prim(lo);
              };
              if (a >= 0.0) {
                acc2 += segment(a, b, 1.0);
              } else if (b <= 0.0) {
                acc2 += segment(a, b, -1.0);
              } else {
                acc2 += segment(a, 0.0, -1.0) + segment(0.0, b, 1.0);
              }
            }
            return acc2;
          }
        },
        comp.shape);
    acc += m;
    if (!std::isfinite(acc)) return kInf;
  }
  return acc;
}

}  // namespace fcrm
