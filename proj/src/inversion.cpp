#include "fcrm/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace fcrm {

namespace {

constexpr double kAtomFlagThreshold = 0.05;

void require_validated(const CharTriplet& t) {
  const ValidationReport report = validate_levy(t.nu);
  if (!report.ok) {
    std::string msg = "triplet failed Levy validation:";
    for (const std::string& m : report.messages) msg += " " + m + ";";
    throw std::invalid_argument(msg);
  }
}

bool positive_only(const LevyMeasure& nu) {
  for (const LevyAtom& atom : nu.atoms) {
    if (atom.location <= 0.0) return false;
  }
  for (const DensityComponent& comp : nu.densities) {
    if (comp.support().first < 0.0) return false;
  }
  return true;
}

double safe_compensator(const CharTriplet& t) {
  try {
    return compensator_integral(t.nu);
  } catch (const std::domain_error&) {
    return 0.0;  // heavy small jumps; the grid falls back on the quantile radius
  }
}

// Linear-in-eps Richardson/Neville extrapolation of (eps_j, v_j) to eps = 0.
double extrapolate_to_zero(std::span<const double> eps, std::span<double> v) {
  const size_t m = eps.size();
  for (size_t level = 1; level < m; ++level) {
    for (size_t i = 0; i + level < m; ++i) {
      const double e0 = eps[i], e1 = eps[i + level];
      v[i] = (e1 * v[i] - e0 * v[i + level]) / (e1 - e0);
    }
  }
  return v.empty() ? 0.0 : v[0];
}

}  // namespace

GridSpec GridSpec::automatic(const CharTriplet& t, int n) {
  const double d = t.eta - safe_compensator(t);
  const double r999 = quantile_radius(t.nu, 1e-3);
  const double m2 = truncated_abs_moment(t.nu, 2, std::max(r999, 1.0));
  double m1 = truncated_abs_moment(t.nu, 1, std::max(r999, 1.0));
  if (!std::isfinite(m1)) m1 = 3.0 * std::sqrt(m2);
  const double jump_width = m1 + 2.0 * std::sqrt(std::max(m2, 0.0)) + r999;
  const double gauss_width = 2.0 * std::sqrt(std::max(t.a, 0.0));

  double lo, hi;
  if (!t.nu.empty() && positive_only(t.nu)) {
    lo = std::min(d, d - gauss_width) - 0.1 * jump_width;
    hi = d + gauss_width + jump_width;
  } else {
    lo = d - gauss_width - jump_width;
    hi = d + gauss_width + jump_width;
  }
  if (!(hi > lo)) {  // pure point mass; give the table something to stand on
    lo -= 1.0;
    hi += 1.0;
  }
  const double center = 0.5 * (lo + hi);
  const double half = 0.6 * (hi - lo);  // 20% padding
  GridSpec g;
  g.lo = center - half;
  g.hi = center + half;
  g.n = n;
  return g;
}

double DensityTable::density_mass() const {
  double mass = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    mass += 0.5 * (rho[i] + rho[i + 1]) * (xs[i + 1] - xs[i]);
  }
  return mass;
}

double DensityTable::atom_mass() const {
  double mass = 0.0;
  for (const DetectedAtom& atom : atom_report) mass += atom.mass;
  return mass;
}

double DensityTable::cdf(double x) const {
  double value = 0.0;
  for (const DetectedAtom& atom : atom_report) {
    if (atom.location <= x) value += atom.mass;
  }
  if (xs.size() >= 2 && x > xs.front()) {
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
      const double a = xs[i], b = xs[i + 1];
      if (x >= b) {
        value += 0.5 * (rho[i] + rho[i + 1]) * (b - a);
      } else if (x > a) {
        const double w = (x - a) / (b - a);
        const double rx = rho[i] + w * (rho[i + 1] - rho[i]);
        value += 0.5 * (rho[i] + rx) * (x - a);
        break;
      } else {
        break;
      }
    }
  }
  return value;
}

double DensityTable::cdf_left(double x) const {
  double value = cdf(x);
  for (const DetectedAtom& atom : atom_report) {
    if (std::abs(atom.location - x) <= 1e-12) value -= atom.mass;
  }
  return value;
}

Complex voiculescu_phi(const CharTriplet& t, Complex u) {
  if (!(u.imag() > 0.0)) {
    throw std::domain_error("voiculescu_phi requires Im u > 0");
  }
  return u * free_cumulant_transform(t, 1.0 / u);
}

std::pair<Complex, SolveDiagnostics> solve_F(const CharTriplet& t, Complex zeta) {
  if (!(zeta.imag() > 0.0)) {
    throw std::domain_error("solve_F requires Im zeta > 0");
  }
  const double target = 1e-10 * std::max(1.0, std::abs(zeta));
  const double im_floor = zeta.imag();

  auto clamp_up = [&](Complex u) {
    return u.imag() >= im_floor ? u : Complex{u.real(), im_floor};
  };
  // F^{-1}(u) - zeta, via the Picard map zeta - phi(u).
  auto picard = [&](Complex u) { return clamp_up(zeta - voiculescu_phi(t, u)); };

  SolveDiagnostics diag;
  Complex u = zeta;
  Complex mapped = picard(u);
  double res = std::abs(mapped - u);
  double damp = 1.0;
  for (int iter = 0; iter < 500 && res > target; ++iter) {
    ++diag.iterations;
    const Complex u_try = clamp_up(u + damp * (mapped - u));
    const Complex mapped_try = picard(u_try);
    const double res_try = std::abs(mapped_try - u_try);
    if (res_try <= res || damp <= 1.0 / 1024.0) {
      u = u_try;
      mapped = mapped_try;
      res = res_try;
      damp = std::min(1.0, 2.0 * damp);
    } else {
      damp *= 0.5;
    }
  }

  // Newton polish with a numerically differentiated F^{-1}.
  auto finv_defect = [&](Complex v) { return v - (zeta - voiculescu_phi(t, v)); };
  for (int polish = 0; polish < 4 && res > 0.0; ++polish) {
    const double h = 1e-7 * std::max(1.0, std::abs(u));
    Complex d1, d0;
    try {
      d0 = finv_defect(u);
      d1 = (finv_defect(u + h) - finv_defect(u - h)) / (2.0 * h);
    } catch (const std::domain_error&) {
      break;
    }
    if (std::abs(d1) < 1e-14) break;
    const Complex u_new = u - d0 / d1;
    if (!(u_new.imag() >= im_floor)) break;
    double res_new;
    try {
      res_new = std::abs(finv_defect(u_new));
    } catch (const std::domain_error&) {
      break;
    }
    if (res_new < res) {
      u = u_new;
      res = res_new;
      ++diag.iterations;
    } else {
      break;
    }
  }

  diag.residual = res;
  diag.converged = res <= target;
  if (!diag.converged) {
    throw NumericalError("solve_F did not converge within 500 iterations", u, res);
  }
  return {u, diag};
}

namespace {

// One boundary evaluation G(x + i eps) = 1 / solve_F(...).
Complex boundary_G(const CharTriplet& t, double x, double eps) {
  const auto [u, diag] = solve_F(t, Complex{x, eps});
  return 1.0 / u;
}

struct AtomScan {
  std::vector<DetectedAtom> atoms;
};

AtomScan detect_atoms(const CharTriplet& t, const std::vector<double>& xs, double eps0,
                      double spacing) {
  AtomScan scan;
  const double eps_det = std::max(spacing, 8.0 * eps0);
  std::vector<double> s(xs.size(), 0.0);
  for (size_t i = 0; i < xs.size(); ++i) {
    try {
      s[i] = -eps_det * boundary_G(t, xs[i], eps_det).imag();
    } catch (const NumericalError&) {
      s[i] = 0.0;
    }
  }
  for (size_t i = 0; i < xs.size(); ++i) {
    const bool peak = s[i] > kAtomFlagThreshold &&
                      (i == 0 || s[i] >= s[i - 1]) &&
                      (i + 1 == xs.size() || s[i] >= s[i + 1]);
    if (!peak) continue;
    // Golden-section refinement of the peak location.
    double a = xs[i] - spacing, b = xs[i] + spacing;
    auto height = [&](double x) { return -boundary_G(t, x, eps_det).imag(); };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = height(x1), f2 = height(x2);
    for (int it = 0; it < 32; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = height(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = height(x1);
      }
    }
    const double x_star = 0.5 * (a + b);
    // Confirm and estimate the mass with small offsets (linear Richardson).
    const double e1 = 4.0 * eps0, e2 = 8.0 * eps0;
    double m1, m2;
    try {
      m1 = -e1 * boundary_G(t, x_star, e1).imag();
      m2 = -e2 * boundary_G(t, x_star, e2).imag();
    } catch (const NumericalError&) {
      continue;
    }
    const double mass = 2.0 * m1 - m2;
    if (mass > kAtomFlagThreshold) {
      bool duplicate = false;
      for (const DetectedAtom& existing : scan.atoms) {
        if (std::abs(existing.location - x_star) < 2.0 * spacing) duplicate = true;
      }
      if (!duplicate) scan.atoms.push_back({x_star, mass});
    }
  }
  return scan;
}

}  // namespace

DensityTable free_density(const CharTriplet& t, const GridSpec& g) {
  if (t.kind != TripletKind::Free) {
    throw std::invalid_argument("free_density needs a FREE triplet");
  }
  require_validated(t);
  if (g.n < 2 || !(g.lo < g.hi) || g.eps_levels < 1) {
    throw std::invalid_argument("invalid grid spec");
  }

  DensityTable table;
  table.xs.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    table.xs[i] = g.lo + g.spacing() * static_cast<double>(i);
  }
  table.rho.assign(g.n, 0.0);

  // Point mass short-circuit: (a=0, nu empty) is delta_eta.
  if (t.a == 0.0 && t.nu.empty()) {
    table.atom_report.push_back({t.eta, 1.0});
    table.mass_deficit = 0.0;
    return table;
  }

  const double eps0 = g.eps0();
  const int levels = g.eps_levels;
  std::vector<double> eps(levels);
  for (int j = 0; j < levels; ++j) eps[j] = eps0 * std::ldexp(1.0, j);

  const AtomScan scan = detect_atoms(t, table.xs, eps0, g.spacing());
  table.atom_report = scan.atoms;

  std::vector<char> missing(g.n, 0);
  int missing_count = 0;
  std::vector<double> work(levels);
  for (int i = 0; i < g.n; ++i) {
    const double x = table.xs[i];
    bool failed = false;
    for (int j = 0; j < levels && !failed; ++j) {
      Complex G;
      try {
        G = boundary_G(t, x, eps[j]);
      } catch (const NumericalError&) {
        failed = true;
        break;
      }
      // Subtract the Poisson kernels of detected atoms before extrapolating.
      for (const DetectedAtom& atom : table.atom_report) {
        G -= atom.mass / (Complex{x - atom.location, eps[j]});
      }
      work[j] = -G.imag() / M_PI;
    }
    if (failed) {
      missing[i] = 1;
      ++missing_count;
      continue;
    }
    table.rho[i] = extrapolate_to_zero(eps, work);
  }

  if (missing_count > 0) {
    if (missing_count > g.n / 100) {
      throw NumericalError("free_density: more than 1% of grid points failed to solve",
                           Complex{static_cast<double>(missing_count), 0.0}, 0.0);
    }
    for (int i = 0; i < g.n; ++i) {
      if (!missing[i]) continue;
      int l = i - 1, r = i + 1;
      while (l >= 0 && missing[l]) --l;
      while (r < g.n && missing[r]) ++r;
      if (l >= 0 && r < g.n) {
        const double w = (table.xs[i] - table.xs[l]) / (table.xs[r] - table.xs[l]);
        table.rho[i] = table.rho[l] + w * (table.rho[r] - table.rho[l]);
      } else if (l >= 0) {
        table.rho[i] = table.rho[l];
      } else if (r < g.n) {
        table.rho[i] = table.rho[r];
      }
    }
    table.notes.push_back(std::to_string(missing_count) +
                          " grid point(s) interpolated after solver failure");
  }

  double min_rho = 0.0;
  for (double& v : table.rho) {
    min_rho = std::min(min_rho, v);
    v = std::max(v, 0.0);
  }
  if (min_rho < -1e-3) {
    table.notes.push_back("extrapolated density dipped below -1e-3 before clamping");
  }

  table.mass_deficit = 1.0 - table.total_mass();
  return table;
}

// --- classical side ---------------------------------------------------------

namespace {

// Exact law of a compound Poisson sum with purely atomic jumps, as a list of
// atoms: sum_k e^{-lambda} lambda^k / k! jump^{*k}, truncated where the
// Poisson tail drops below 1e-12.
std::vector<DetectedAtom> lattice_compound_poisson(const std::vector<LevyAtom>& jump_atoms,
                                                   double scale_mass, double shift,
                                                   std::vector<std::string>& notes) {
  const double lambda = [&] {
    double s = 0.0;
    for (const LevyAtom& atom : jump_atoms) s += atom.weight;
    return s;
  }();

  std::map<long long, std::pair<double, double>> law;  // key -> (location, mass)
  auto key_of = [](double x) {
    return static_cast<long long>(std::llround(x * 1e9));
  };
  auto add_mass = [&](double x, double m) {
    const long long k = key_of(x);
    auto [it, inserted] = law.emplace(k, std::make_pair(x, m));
    if (!inserted) it->second.second += m;
  };

  int k_max = 0;
  {
    double tail = 1.0, term = std::exp(-lambda);
    tail -= term;
    while (tail > 1e-12 && k_max < 400) {
      ++k_max;
      term *= lambda / k_max;
      tail -= term;
    }
  }

  std::vector<std::pair<double, double>> conv{{0.0, 1.0}};  // jump^{*k} pmf
  double poisson_term = std::exp(-lambda);
  add_mass(0.0, poisson_term);
  for (int k = 1; k <= k_max; ++k) {
    std::map<long long, std::pair<double, double>> next;
    for (const auto& [x, m] : conv) {
      for (const LevyAtom& atom : jump_atoms) {
        const double loc = x + atom.location;
        const double mass = m * atom.weight / lambda;
        const long long kk = key_of(loc);
        auto [it, inserted] = next.emplace(kk, std::make_pair(loc, mass));
        if (!inserted) it->second.second += mass;
      }
    }
    conv.clear();
    conv.reserve(next.size());
    for (const auto& [kk, lm] : next) conv.push_back(lm);
    if (conv.size() > 20000) {
      std::sort(conv.begin(), conv.end(),
                [](const auto& a, const auto& b) { return a.second > b.second; });
      conv.resize(20000);
      notes.push_back("lattice convolution support truncated at 20000 atoms");
    }
    poisson_term *= lambda / k;
    for (const auto& [x, m] : conv) add_mass(x, poisson_term * m);
  }

  std::vector<DetectedAtom> out;
  out.reserve(law.size());
  for (const auto& [kk, lm] : law) {
    const double mass = lm.second * scale_mass;
    if (mass >= 1e-12) out.push_back({lm.first + shift, mass});
  }
  std::sort(out.begin(), out.end(),
            [](const DetectedAtom& a, const DetectedAtom& b) { return a.location < b.location; });
  return out;
}

}  // namespace

DensityTable classical_density(const CharTriplet& t, const GridSpec& g) {
  if (t.kind != TripletKind::Classical) {
    throw std::invalid_argument("classical_density needs a CLASSICAL triplet");
  }
  require_validated(t);
  if (g.n < 2 || !(g.lo < g.hi)) throw std::invalid_argument("invalid grid spec");

  DensityTable table;
  table.xs.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    table.xs[i] = g.lo + g.spacing() * static_cast<double>(i);
  }
  table.rho.assign(g.n, 0.0);

  if (t.a == 0.0 && t.nu.empty()) {
    table.atom_report.push_back({t.eta, 1.0});
    return table;
  }

  const double lambda_total = total_mass(t.nu);
  const bool finite_activity = std::isfinite(lambda_total);

  // Purely atomic compound Poisson: the law is a lattice of atoms; report it
  // exactly instead of pretending a density exists.
  if (t.a == 0.0 && finite_activity && t.nu.densities.empty()) {
    const double drift = t.eta - compensator_integral(t.nu);
    table.atom_report = lattice_compound_poisson(t.nu.atoms, 1.0, drift, table.notes);
    table.notes.push_back("purely atomic law: density identically zero, atoms listed");
    table.mass_deficit = 1.0 - table.total_mass();
    return table;
  }

  // Atomic skeleton of a finite-activity law without Gaussian part: the
  // visible atoms come from atomic-jump-only configurations.
  std::vector<DetectedAtom> skeleton;
  if (t.a == 0.0 && finite_activity) {
    double lambda_density = 0.0;
    for (const DensityComponent& comp : t.nu.densities) {
      LevyMeasure single;
      single.densities.push_back(comp);
      lambda_density += total_mass(single);
    }
    const double drift = t.eta - compensator_integral(t.nu);
    if (t.nu.atoms.empty()) {
      skeleton.push_back({drift, std::exp(-lambda_density)});
    } else {
      skeleton =
          lattice_compound_poisson(t.nu.atoms, std::exp(-lambda_density), drift, table.notes);
    }
  }
  table.atom_report = skeleton;

  // Decay scan for the frequency cutoff of the atom-subtracted
  // characteristic function.
  auto phi_ac = [&](double r) -> Complex {
    Complex value = std::exp(classical_exponent(t, r));
    for (const DetectedAtom& atom : skeleton) {
      value -= atom.mass * std::exp(Complex{0.0, r * atom.location});
    }
    return value;
  };

  const double r_cap = 4096.0;
  double R = 16.0;
  while (R < r_cap) {
    double worst = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const double r = R * (0.75 + 0.25 * k / 8.0);
      worst = std::max(worst, std::abs(phi_ac(r)));
    }
    if (worst < 1e-12) break;
    R *= 2.0;
  }
  if (R >= r_cap) {
    R = r_cap;
    table.notes.push_back("characteristic function still above 1e-12 at the frequency cap");
  }

  const double width = 4.0 * std::max({std::abs(g.lo), std::abs(g.hi), 1.0}) + 2.0 * (g.hi - g.lo);
  long m_nodes = static_cast<long>(std::ceil(R * width / (2.0 * M_PI)));
  const long m_cap = 1L << 16;
  if (m_nodes > m_cap) {
    m_nodes = m_cap;
    table.notes.push_back("frequency grid capped; aliasing tolerance reduced");
  }
  m_nodes = std::max<long>(m_nodes, 64);
  const double dr = R / static_cast<double>(m_nodes);

  std::vector<Complex> phi_vals(m_nodes + 1);
  for (long j = 0; j <= m_nodes; ++j) phi_vals[j] = phi_ac(dr * static_cast<double>(j));

  for (int i = 0; i < g.n; ++i) {
    const double x = table.xs[i];
    const Complex step = std::exp(Complex{0.0, -dr * x});
    Complex rot{1.0, 0.0};
    Complex acc{0.0, 0.0};
    for (long j = 0; j <= m_nodes; ++j) {
      const double w = (j == 0 || j == m_nodes) ? 0.5 : 1.0;
      acc += w * rot * phi_vals[j];
      rot *= step;
      if ((j & 511) == 511) rot = std::exp(Complex{0.0, -dr * x * static_cast<double>(j + 1)});
    }
    table.rho[i] = acc.real() * dr / M_PI;
  }

  double min_rho = 0.0;
  for (double& v : table.rho) {
    min_rho = std::min(min_rho, v);
    v = std::max(v, 0.0);
  }
  if (min_rho < -1e-3) {
    table.notes.push_back("inverted density dipped below -1e-3 before clamping");
  }
  table.mass_deficit = 1.0 - table.total_mass();
  return table;
}

double ks_between(const DensityTable& table, std::span<const double> sorted_samples) {
  if (std::abs(table.mass_deficit) > 2e-2) {
    throw std::invalid_argument("table mass must be complete within 2e-2 for a KS comparison");
  }
  const size_t n = sorted_samples.size();
  if (n == 0) throw std::invalid_argument("empty sample");
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double s = sorted_samples[i];
    const double up = static_cast<double>(i + 1) / static_cast<double>(n);
    const double down = static_cast<double>(i) / static_cast<double>(n);
    d = std::max(d, up - table.cdf(s));
    d = std::max(d, table.cdf_left(s) - down);
  }
  return d;
}

ConcreteLaw to_concrete_law(const DensityTable& table) {
  ConcreteLaw law;
  const double mass = table.total_mass();
  if (!(mass > 0.0)) throw std::invalid_argument("table carries no mass");
  const double scale = 1.0 / mass;
  for (const DetectedAtom& atom : table.atom_report) {
    law.atoms.push_back({atom.location, atom.mass * scale});
  }
  law.xs = table.xs;
  law.rho = table.rho;
  for (double& v : law.rho) v *= scale;
  return law;
}

}  // namespace fcrm
