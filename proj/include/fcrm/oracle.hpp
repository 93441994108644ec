#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcrm/levy.hpp"
#include "fcrm/model.hpp"

namespace fcrm {

/// Sorted eigenvalues (or scalar samples), with the provenance needed to
/// regenerate them bit-for-bit.
struct EmpiricalSpectrum {
  std::vector<double> values;
  long n = 0;
  uint64_t seed = 0;
  std::string model_tag;
};

/// Finite-size matrix model whose empirical spectrum converges to a free
/// law: semicircle block, rank-one compound Poisson block, deterministic
/// shift, or a freely-combined sum of those via independent Haar rotations.
struct MatrixModelSpec {
  enum class Kind { Goe, CompoundFreePoisson, Shift, Sum };

  Kind kind = Kind::Shift;
  double goe_variance = 1.0;
  double cfp_rate = 1.0;
  LevyMeasure cfp_jump;            // jump measure, normalized when sampling
  double cfp_truncation = 0.0;     // jumps below this size are dropped
  double shift_value = 0.0;
  std::vector<MatrixModelSpec> parts;

  static MatrixModelSpec goe(double a);
  static MatrixModelSpec compound_free_poisson(double rate, LevyMeasure jump,
                                               double truncation = 0.0);
  static MatrixModelSpec shift(double c);
  static MatrixModelSpec sum(std::vector<MatrixModelSpec> parts);
};

/// Small-jump truncation threshold used when a measure has infinite mass.
inline constexpr double kJumpTruncationDelta = 1e-4;

/// Eigenvalues of an n x n symmetric Gaussian matrix scaled so the spectrum
/// converges to the semicircle of variance a (support [-2 sqrt(a), 2 sqrt(a)]).
EmpiricalSpectrum sample_goe(double a, int n, uint64_t seed);

/// Eigenvalues of sum_{i<=P} x_i v_i v_i^T with P ~ Poisson(lambda n), jump
/// sizes from the normalized measure, and independent uniform unit vectors;
/// converges to the free compound Poisson law of rate lambda.
EmpiricalSpectrum sample_compound_free_poisson(double lambda, const LevyMeasure& jump, int n,
                                               uint64_t seed);

/// Eigenvalues of A_1 + U_2 A_2 U_2^T + ...: independent Haar-orthogonal
/// rotations realize free independence asymptotically, so the spectrum
/// approximates the free convolution of the component laws.
EmpiricalSpectrum free_add_oracle(const std::vector<MatrixModelSpec>& specs, int n,
                                  uint64_t seed);

/// Scalar Monte Carlo of the classical Poisson integral alpha(E) + L(E):
/// Poisson-many jumps from nu_B restricted to E's intensity. Infinite-mass
/// nu_B is truncated below kJumpTruncationDelta with the dropped mean added
/// back as drift; pass truncate = false to forbid that (throws instead).
EmpiricalSpectrum sample_classical_L(const FcrmModel& model, const RegionSet& E, int reps,
                                     uint64_t seed, bool truncate = true);

/// Scalar Monte Carlo of a classical infinitely divisible triplet:
/// drift + Gaussian + compensated jumps (small jumps truncated as above).
EmpiricalSpectrum sample_classical_id(const CharTriplet& t, int reps, uint64_t seed);

/// Unsorted per-replicate samples (replicate i uses stream (seed, i), so
/// pairing across calls yields independent pairs).
std::vector<double> classical_id_samples_raw(const CharTriplet& t, int reps, uint64_t seed);

/// Matrix model matching a free triplet: shift by the decompensated drift,
/// GOE block for the Gaussian part, compound-Poisson block for the jumps
/// (truncated below delta when nu has infinite mass, with the dropped mean
/// folded into the shift).
MatrixModelSpec matrix_model_for(const CharTriplet& t);

}  // namespace fcrm
