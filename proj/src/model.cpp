#include "fcrm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fcrm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAdditivityTol = 1e-9;

// closed-form mass of a density component on [lo, hi)
double component_interval_mass(const DensityComponent& comp, double lo, double hi) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          const double a = std::max(lo, d.lo), b = std::min(hi, d.hi);
          return b > a ? d.height * (b - a) : 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          if (d.side == Side::Positive) {
            const double a = std::max(lo, 0.0), b = hi;
            if (b <= a) return 0.0;
            const double eb = std::isfinite(b) ? std::exp(-d.rate * b) : 0.0;
            return d.scale / d.rate * (std::exp(-d.rate * a) - eb);
          }
          const double a = lo, b = std::min(hi, 0.0);
          if (b <= a) return 0.0;
          const double ea = std::isfinite(a) ? std::exp(d.rate * a) : 0.0;
          return d.scale / d.rate * (std::exp(d.rate * b) - ea);
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          double a, b;
          if (d.side == Side::Positive) {
            a = std::max(lo, 0.0);
            b = std::min(hi, d.cutoff);
          } else {
            a = std::max(lo, -d.cutoff);
            b = std::min(hi, 0.0);
          }
          if (b <= a) return 0.0;
          const double alo = std::min(std::abs(a), std::abs(b));
          const double ahi = std::max(std::abs(a), std::abs(b));
          if (alo <= 0.0) return kInf;
          const double upper = std::isfinite(ahi) ? std::pow(ahi, -d.p) : 0.0;
          return d.c / d.p * (std::pow(alo, -d.p) - upper);
        } else {
          double acc = 0.0;
          for (size_t i = 0; i + 1 < d.nodes.size(); ++i) {
            const double a = std::max(lo, d.nodes[i]);
            const double b = std::min(hi, d.nodes[i + 1]);
            if (b <= a) continue;
            const double va = d.values[i], vb = d.values[i + 1];
            auto lerp = [&](double x) {
              return va + (vb - va) * (x - d.nodes[i]) / (d.nodes[i + 1] - d.nodes[i]);
            };
            acc += 0.5 * (lerp(a) + lerp(b)) * (b - a);
          }
          return acc;
        }
      },
      comp.shape);
}

void require_disjoint(std::span<const RegionSet> parts) {
  if (!RegionSet::pairwise_disjoint(parts)) {
    throw std::invalid_argument("regions must be pairwise disjoint");
  }
}

}  // namespace

bool is_free_regular(const CharTriplet& t, std::string* why) {
  auto reject = [&](const char* reason) {
    if (why) *why = reason;
    return false;
  };
  if (t.kind != TripletKind::Free) return reject("law must be a free triplet");
  if (t.a != 0.0) return reject("free-regular laws carry no Gaussian part");
  const ValidationReport report = validate_levy(t.nu);
  if (!report.ok) return reject("Levy measure failed validation");
  for (const LevyAtom& atom : t.nu.atoms) {
    if (atom.location <= 0.0) return reject("jump measure must live on (0, inf)");
  }
  for (const DensityComponent& comp : t.nu.densities) {
    if (comp.support().first < 0.0) return reject("jump measure must live on (0, inf)");
  }
  if (!std::isfinite(report.small_jump_abs_mean)) {
    return reject("fixed-atom laws need a finite small-jump mean");
  }
  const double drift = t.eta - compensator_integral(t.nu);
  if (drift < -1e-9) return reject("decompensated drift must be nonnegative");
  return true;
}

ModelReport validate_model(const FcrmModel& m) {
  ModelReport report;
  report.ok = true;
  auto fail = [&report](std::string msg) {
    report.ok = false;
    report.messages.push_back(std::move(msg));
  };

  const ValidationReport nu_b_report = validate_levy(m.nu_B);
  if (!nu_b_report.ok) {
    for (const std::string& msg : nu_b_report.messages) fail("nu_B: " + msg);
    if (nu_b_report.messages.empty()) fail("nu_B failed validation");
  }
  for (const LevyAtom& atom : m.nu_B.atoms) {
    if (atom.location <= 0.0) {
      fail("nu_B: jumps must be positive");
      break;
    }
  }
  for (const DensityComponent& comp : m.nu_B.densities) {
    if (comp.support().first < 0.0) {
      fail("nu_B: jump density must live on (0, inf)");
      break;
    }
  }

  for (const BaseMeasure* base : {&m.alpha, &m.nu_E}) {
    const char* name = base == &m.alpha ? "alpha" : "nu_E";
    for (const LevyAtom& atom : base->atoms) {
      if (atom.weight < 0.0 || !std::isfinite(atom.weight) || !std::isfinite(atom.location)) {
        fail(std::string(name) + ": atom weights must be finite and nonnegative");
        break;
      }
    }
    for (const DensityComponent& comp : base->densities) {
      for (const std::string& msg : density_structural_errors(comp)) {
        fail(std::string(name) + ": " + msg);
      }
    }
  }

  std::vector<double> locations;
  for (const FixedAtom& atom : m.fixed_atoms) locations.push_back(atom.location);
  std::sort(locations.begin(), locations.end());
  for (size_t i = 0; i + 1 < locations.size(); ++i) {
    if (locations[i + 1] - locations[i] < kAtomMergeTol) {
      fail("fixed atoms must have distinct locations");
      break;
    }
  }
  for (const FixedAtom& atom : m.fixed_atoms) {
    std::string why;
    if (!is_free_regular(atom.law, &why)) {
      fail("fixed atom at " + std::to_string(atom.location) + ": " + why);
    }
  }
  return report;
}

double region_mass(const BaseMeasure& m, const RegionSet& E) {
  double mass = 0.0;
  for (const LevyAtom& atom : m.atoms) {
    if (E.contains(atom.location)) mass += atom.weight;
  }
  for (const DensityComponent& comp : m.densities) {
    for (const Interval& iv : E.intervals()) {
      mass += component_interval_mass(comp, iv.lo, iv.hi);
      if (!std::isfinite(mass)) return kInf;
    }
  }
  return mass;
}

CharTriplet h_law(const FcrmModel& m, const RegionSet& E) {
  if (!std::isfinite(small_jump_abs_mean(m.nu_B))) {
    throw std::domain_error(
        "h_law needs integrable small jumps: the |x| <= 1 absolute mean of "
        "nu_B must be finite");
  }
  const double lambda = region_mass(m.nu_E, E);
  if (!std::isfinite(lambda)) {
    throw std::domain_error("nu_E is not finite on the requested region");
  }
  if (lambda == 0.0) return CharTriplet::free_triplet(0.0, 0.0);
  const double k = compensator_integral(m.nu_B);
  return CharTriplet::free_triplet(0.0, lambda * k, scale_measure(m.nu_B, lambda));
}

CharTriplet j_law(const FcrmModel& m, const RegionSet& E) {
  CharTriplet law = CharTriplet::free_triplet(0.0, 0.0);
  for (const FixedAtom& atom : m.fixed_atoms) {
    if (E.contains(atom.location)) law = triplet_add(law, atom.law);
  }
  return law;
}

CharTriplet g_law(const FcrmModel& m, const RegionSet& E) {
  const double alpha_mass = region_mass(m.alpha, E);
  if (!std::isfinite(alpha_mass)) {
    throw std::domain_error("alpha is not finite on the requested region");
  }
  return triplet_shift(triplet_add(h_law(m, E), j_law(m, E)), alpha_mass);
}

CharTriplet classical_counterpart_law(const FcrmModel& m, const RegionSet& E) {
  if (!m.fixed_atoms.empty()) {
    throw std::invalid_argument(
        "the classical counterpart law applies to the without-fixed-atoms class");
  }
  CharTriplet law = g_law(m, E);
  law.kind = TripletKind::Classical;
  return law;
}

Complex h_cumulant_direct(const FcrmModel& m, const RegionSet& E, Complex z) {
  const double lambda = region_mass(m.nu_E, E);
  if (!std::isfinite(lambda)) {
    throw std::domain_error("nu_E is not finite on the requested region");
  }
  return free_compound_kernel(lambda, m.nu_B, z);
}

AdditivityReport check_additivity(const FcrmModel& m, std::span<const RegionSet> parts) {
  require_disjoint(parts);
  AdditivityReport report;
  report.disjoint = true;
  report.union_law = g_law(m, RegionSet::union_of(parts));
  CharTriplet sum = CharTriplet::free_triplet(0.0, 0.0);
  for (const RegionSet& part : parts) sum = triplet_add(sum, g_law(m, part));
  report.sum_law = sum;
  report.ok = triplets_close(report.union_law, report.sum_law, kAdditivityTol);
  if (!report.ok) {
    report.messages.push_back("union law and part-sum law disagree beyond tolerance");
  }
  return report;
}

}  // namespace fcrm
