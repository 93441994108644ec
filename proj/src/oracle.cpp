#include "fcrm/oracle.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fcrm/measure_integral.hpp"
#include "fcrm/quadrature.hpp"
#include "fcrm/rng.hpp"

namespace fcrm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<double> symmetric_eigenvalues(MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> w(n);
  const int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  if (info != 0) {
    throw NumericalError("symmetric eigensolver failed (dsyevd info != 0)",
                         Complex{static_cast<double>(info), 0.0}, 0.0);
  }
  return w;  // ascending
}

// One drawable piece of a (possibly truncated) jump measure.
struct JumpPiece {
  double mass = 0.0;
  // inverse CDF of the normalized piece
  std::function<double(double)> draw;
};

// Samples the normalized restriction of a Levy measure to |x| >= delta.
class JumpSampler {
 public:
  JumpSampler(const LevyMeasure& nu, double delta) {
    for (const LevyAtom& atom : nu.atoms) {
      if (std::abs(atom.location) < delta) continue;
      const double x = atom.location;
      pieces_.push_back({atom.weight, [x](double) { return x; }});
    }
    for (const DensityComponent& comp : nu.densities) add_component(comp, delta);
    for (const JumpPiece& piece : pieces_) mass_ += piece.mass;
  }

  double mass() const { return mass_; }

  double draw(rng::Stream& st) const {
    const double u = st.uniform01() * mass_;
    double acc = 0.0;
    for (const JumpPiece& piece : pieces_) {
      acc += piece.mass;
      if (u <= acc || &piece == &pieces_.back()) {
        return piece.draw(st.uniform01());
      }
    }
    return 0.0;  // unreachable: mass_ > 0 guarantees a piece
  }

 private:
  void add_linear_segment(double a, double b, double va, double vb) {
    if (!(b > a)) return;
    const double mass = 0.5 * (va + vb) * (b - a);
    if (!(mass > 0.0)) return;
    const double slope = (vb - va) / (b - a);
    pieces_.push_back({mass, [a, b, va, slope, mass](double u) {
                         // solve va (x-a) + slope (x-a)^2 / 2 = u * mass
                         const double target = u * mass;
                         if (std::abs(slope) < 1e-300) {
                           return a + target / va;
                         }
                         const double disc = va * va + 2.0 * slope * target;
                         const double dx = (-va + std::sqrt(std::max(disc, 0.0))) / slope;
                         return std::min(b, std::max(a, a + dx));
                       }});
  }

  void add_component(const DensityComponent& comp, double delta) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
          if constexpr (std::is_same_v<T, UniformDensity>) {
            const double a_pos = std::max(d.lo, delta), b_pos = d.hi;
            if (b_pos > a_pos) {
              const double mass = d.height * (b_pos - a_pos);
              pieces_.push_back(
                  {mass, [a_pos, b_pos](double u) { return a_pos + u * (b_pos - a_pos); }});
            }
            const double a_neg = d.lo, b_neg = std::min(d.hi, -delta);
            if (b_neg > a_neg) {
              const double mass = d.height * (b_neg - a_neg);
              pieces_.push_back(
                  {mass, [a_neg, b_neg](double u) { return a_neg + u * (b_neg - a_neg); }});
            }
          } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
            const double sgn = side_sign(d.side);
            const double lo = std::max(delta, 0.0);
            const double mass = d.scale / d.rate * std::exp(-d.rate * lo);
            const double rate = d.rate;
            pieces_.push_back({mass, [lo, rate, sgn](double u) {
                                 return sgn * (lo - std::log1p(-u) / rate);
                               }});
          } else if constexpr (std::is_same_v<T, PowerDensity>) {
            const double sgn = side_sign(d.side);
            if (!(delta > 0.0)) {
              throw std::invalid_argument(
                  "power jump component has infinite mass; a positive truncation is required");
            }
            if (delta >= d.cutoff) return;
            const double p = d.p;
            const double lo_pow = std::pow(delta, -p);
            const double hi_pow = std::isfinite(d.cutoff) ? std::pow(d.cutoff, -p) : 0.0;
            const double mass = d.c / p * (lo_pow - hi_pow);
            pieces_.push_back({mass, [lo_pow, hi_pow, p, sgn](double u) {
                                 const double w = lo_pow - u * (lo_pow - hi_pow);
                                 return sgn * std::pow(w, -1.0 / p);
                               }});
          } else {
            for (size_t i = 0; i + 1 < d.nodes.size(); ++i) {
              const double a = d.nodes[i], b = d.nodes[i + 1];
              const double va = d.values[i], vb = d.values[i + 1];
              auto lerp = [&](double x) { return va + (vb - va) * (x - a) / (b - a); };
              // clip to |x| >= delta
              const double ap = std::max(a, delta);
              if (b > ap) add_linear_segment(ap, b, lerp(ap), lerp(b));
              const double bn = std::min(b, -delta);
              if (bn > a) add_linear_segment(a, bn, lerp(a), lerp(bn));
            }
          }
        },
        comp.shape);
  }

  std::vector<JumpPiece> pieces_;
  double mass_ = 0.0;
};

MatrixXd goe_matrix(double a, int n, rng::Stream& st) {
  MatrixXd m(n, n);
  const double off = std::sqrt(a / n);
  const double diag = std::sqrt(2.0 * a / n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double g = st.normal();
      const double v = (i == j ? diag : off) * g;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

MatrixXd cfp_matrix(double lambda, const LevyMeasure& jump, double truncation, int n,
                    rng::Stream& st) {
  const JumpSampler sampler(jump, truncation);
  if (!(sampler.mass() > 0.0) || !std::isfinite(sampler.mass())) {
    throw std::invalid_argument("compound-Poisson jump law must have positive finite mass");
  }
  const long p = st.poisson(lambda * n);
  MatrixXd a = MatrixXd::Zero(n, n);
  if (p == 0) return a;

  const long chunk = 256;
  MatrixXd v(n, std::min<long>(p, chunk));
  VectorXd x(std::min<long>(p, chunk));
  long done = 0;
  while (done < p) {
    const long count = std::min<long>(chunk, p - done);
    for (long i = 0; i < count; ++i) {
      x(i) = sampler.draw(st);
      double norm2 = 0.0;
      for (int row = 0; row < n; ++row) {
        const double g = st.normal();
        v(row, i) = g;
        norm2 += g * g;
      }
      v.col(i) /= std::sqrt(norm2);
    }
    a.noalias() += v.leftCols(count) * x.head(count).asDiagonal() * v.leftCols(count).transpose();
    done += count;
  }
  return 0.5 * (a + a.transpose());
}

MatrixXd haar_orthogonal(int n, rng::Stream& st) {
  MatrixXd z(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) z(i, j) = st.normal();
  }
  Eigen::HouseholderQR<MatrixXd> qr(z);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
  const VectorXd diag = qr.matrixQR().diagonal();
  for (int j = 0; j < n; ++j) {
    if (diag(j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

std::vector<const MatrixModelSpec*> flatten(const std::vector<MatrixModelSpec>& specs) {
  std::vector<const MatrixModelSpec*> flat;
  std::function<void(const MatrixModelSpec&)> visit = [&](const MatrixModelSpec& spec) {
    if (spec.kind == MatrixModelSpec::Kind::Sum) {
      for (const MatrixModelSpec& part : spec.parts) visit(part);
    } else {
      flat.push_back(&spec);
    }
  };
  for (const MatrixModelSpec& spec : specs) visit(spec);
  return flat;
}

MatrixXd component_matrix(const MatrixModelSpec& spec, int n, rng::Stream& st) {
  switch (spec.kind) {
    case MatrixModelSpec::Kind::Goe:
      return goe_matrix(spec.goe_variance, n, st);
    case MatrixModelSpec::Kind::CompoundFreePoisson:
      return cfp_matrix(spec.cfp_rate, spec.cfp_jump, spec.cfp_truncation, n, st);
    case MatrixModelSpec::Kind::Shift:
      return spec.shift_value * MatrixXd::Identity(n, n);
    default:
      throw std::invalid_argument("flattened model cannot contain a Sum node");
  }
}

// signed integral of x over |x| < delta (dropped small jumps)
double small_jump_signed_mean(const LevyMeasure& nu, double delta) {
  if (delta <= 0.0) return 0.0;
  const std::vector<double> breaks{-delta, delta};
  return integrate_against(
             nu,
             [delta](double x) {
               return Complex{std::abs(x) < delta ? x : 0.0, 0.0};
             },
             1e-10, breaks)
      .real();
}

// integral of x over delta <= |x| <= 1 (the compensator minus dropped jumps)
double compensator_above(const LevyMeasure& nu, double delta) {
  const std::vector<double> breaks{-delta, delta};
  return integrate_against(
             nu,
             [delta](double x) {
               const double ax = std::abs(x);
               return Complex{(ax >= delta && ax <= 1.0) ? x : 0.0, 0.0};
             },
             1e-10, breaks)
      .real();
}

}  // namespace

MatrixModelSpec MatrixModelSpec::goe(double a) {
  MatrixModelSpec spec;
  spec.kind = Kind::Goe;
  spec.goe_variance = a;
  return spec;
}

MatrixModelSpec MatrixModelSpec::compound_free_poisson(double rate, LevyMeasure jump,
                                                       double truncation) {
  if (!(rate > 0.0)) throw std::invalid_argument("compound-Poisson rate must be positive");
  MatrixModelSpec spec;
  spec.kind = Kind::CompoundFreePoisson;
  spec.cfp_rate = rate;
  spec.cfp_jump = std::move(jump);
  spec.cfp_truncation = truncation;
  return spec;
}

MatrixModelSpec MatrixModelSpec::shift(double c) {
  MatrixModelSpec spec;
  spec.kind = Kind::Shift;
  spec.shift_value = c;
  return spec;
}

MatrixModelSpec MatrixModelSpec::sum(std::vector<MatrixModelSpec> parts) {
  MatrixModelSpec spec;
  spec.kind = Kind::Sum;
  spec.parts = std::move(parts);
  return spec;
}

EmpiricalSpectrum sample_goe(double a, int n, uint64_t seed) {
  if (!(a > 0.0)) throw std::invalid_argument("GOE scale must be positive");
  if (n < 2) throw std::invalid_argument("matrix size must be at least 2");
  rng::Stream st(seed, 0);
  EmpiricalSpectrum spectrum;
  spectrum.values = symmetric_eigenvalues(goe_matrix(a, n, st));
  spectrum.n = n;
  spectrum.seed = seed;
  spectrum.model_tag = "goe";
  return spectrum;
}

EmpiricalSpectrum sample_compound_free_poisson(double lambda, const LevyMeasure& jump, int n,
                                               uint64_t seed) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rate must be positive");
  if (n < 2) throw std::invalid_argument("matrix size must be at least 2");
  if (!std::isfinite(total_mass(jump))) {
    throw std::invalid_argument(
        "jump law must be normalizable; truncate infinite-mass measures first");
  }
  rng::Stream st(seed, 0);
  EmpiricalSpectrum spectrum;
  spectrum.values = symmetric_eigenvalues(cfp_matrix(lambda, jump, 0.0, n, st));
  spectrum.n = n;
  spectrum.seed = seed;
  spectrum.model_tag = "cfp";
  return spectrum;
}

EmpiricalSpectrum free_add_oracle(const std::vector<MatrixModelSpec>& specs, int n,
                                  uint64_t seed) {
  if (n < 2) throw std::invalid_argument("matrix size must be at least 2");
  const std::vector<const MatrixModelSpec*> flat = flatten(specs);
  if (flat.empty()) throw std::invalid_argument("empty model list");
  MatrixXd total = MatrixXd::Zero(n, n);
  for (size_t k = 0; k < flat.size(); ++k) {
    rng::Stream ms(seed, 100 + k);
    MatrixXd block = component_matrix(*flat[k], n, ms);
    if (k > 0 && flat[k]->kind != MatrixModelSpec::Kind::Shift) {
      rng::Stream rs(seed, 200 + k);
      const MatrixXd u = haar_orthogonal(n, rs);
      block = u * block * u.transpose();
    }
    total += block;
  }
  EmpiricalSpectrum spectrum;
  spectrum.values = symmetric_eigenvalues(0.5 * (total + total.transpose()));
  spectrum.n = n;
  spectrum.seed = seed;
  spectrum.model_tag = "free_add";
  return spectrum;
}

EmpiricalSpectrum sample_classical_L(const FcrmModel& model, const RegionSet& E, int reps,
                                     uint64_t seed, bool truncate) {
  if (reps < 1) throw std::invalid_argument("reps must be positive");
  if (!model.fixed_atoms.empty()) {
    throw std::invalid_argument("the classical Poisson integral applies to models "
                                "without fixed atoms");
  }
  if (!std::isfinite(small_jump_abs_mean(model.nu_B))) {
    throw std::domain_error("nu_B needs a finite small-jump absolute mean");
  }
  const double lambda_region = region_mass(model.nu_E, E);
  if (!std::isfinite(lambda_region)) {
    throw std::domain_error("nu_E is not finite on the requested region");
  }
  double delta = 0.0;
  if (!std::isfinite(total_mass(model.nu_B))) {
    if (!truncate) {
      throw std::invalid_argument(
          "nu_B has infinite total mass; sampling requires the small-jump "
          "truncation flag (truncate = true)");
    }
    delta = kJumpTruncationDelta;
  }
  const JumpSampler sampler(model.nu_B, delta);
  const double intensity = lambda_region * sampler.mass();
  const double drift_compensation =
      delta > 0.0 ? lambda_region * truncated_abs_moment(model.nu_B, 1, delta) : 0.0;
  const double alpha_mass = region_mass(model.alpha, E);

  EmpiricalSpectrum out;
  out.values.resize(reps);
  for (int rep = 0; rep < reps; ++rep) {
    rng::Stream st(seed, rep);
    const long jumps = st.poisson(intensity);
    double value = alpha_mass + drift_compensation;
    for (long i = 0; i < jumps; ++i) value += sampler.draw(st);
    out.values[rep] = value;
  }
  std::sort(out.values.begin(), out.values.end());
  out.n = reps;
  out.seed = seed;
  out.model_tag = "classical_L";
  return out;
}

std::vector<double> classical_id_samples_raw(const CharTriplet& t, int reps, uint64_t seed) {
  double delta = 0.0;
  if (!std::isfinite(total_mass(t.nu))) delta = kJumpTruncationDelta;
  const JumpSampler sampler(t.nu, delta);
  const double intensity = sampler.mass();
  const double drift = t.eta - compensator_above(t.nu, delta);
  const double sigma = std::sqrt(std::max(t.a, 0.0));

  std::vector<double> values(reps);
  for (int rep = 0; rep < reps; ++rep) {
    rng::Stream st(seed, rep);
    double value = drift;
    if (sigma > 0.0) value += sigma * st.normal();
    const long jumps = intensity > 0.0 ? st.poisson(intensity) : 0;
    for (long i = 0; i < jumps; ++i) value += sampler.draw(st);
    values[rep] = value;
  }
  return values;
}

EmpiricalSpectrum sample_classical_id(const CharTriplet& t, int reps, uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("reps must be positive");
  if (t.kind != TripletKind::Classical) {
    throw std::invalid_argument("sample_classical_id needs a CLASSICAL triplet");
  }
  EmpiricalSpectrum out;
  out.values = classical_id_samples_raw(t, reps, seed);
  std::sort(out.values.begin(), out.values.end());
  out.n = reps;
  out.seed = seed;
  out.model_tag = "classical_id";
  return out;
}

MatrixModelSpec matrix_model_for(const CharTriplet& t) {
  if (t.kind != TripletKind::Free) {
    throw std::invalid_argument("matrix_model_for needs a FREE triplet");
  }
  double delta = 0.0;
  if (!std::isfinite(total_mass(t.nu))) delta = kJumpTruncationDelta;
  const double decompensated = t.eta - compensator_integral(t.nu);
  const double dropped_mean = small_jump_signed_mean(t.nu, delta);

  std::vector<MatrixModelSpec> parts;
  const double shift = decompensated + dropped_mean;
  if (shift != 0.0) parts.push_back(MatrixModelSpec::shift(shift));
  if (t.a > 0.0) parts.push_back(MatrixModelSpec::goe(t.a));
  const JumpSampler sampler(t.nu, delta);
  if (sampler.mass() > 0.0) {
    parts.push_back(MatrixModelSpec::compound_free_poisson(sampler.mass(), t.nu, delta));
  }
  if (parts.empty()) parts.push_back(MatrixModelSpec::shift(0.0));
  return MatrixModelSpec::sum(std::move(parts));
}

}  // namespace fcrm
