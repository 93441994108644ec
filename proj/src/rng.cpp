#include "fcrm/rng.hpp"

#include <cmath>

namespace fcrm::rng {

long Stream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean < 10.0) {
    // Knuth: count uniforms until their product drops below e^{-mean}.
    const double threshold = std::exp(-mean);
    long k = 0;
    double product = uniform01();
    while (product > threshold) {
      ++k;
      product *= uniform01();
    }
    return k;
  }
  // PTRS (Hormann 1993): transformed rejection with squeeze.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  while (true) {
    const double u = uniform01() - 0.5;
    const double v = uniform01();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const long k = static_cast<long>(kf);
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

}  // namespace fcrm::rng
