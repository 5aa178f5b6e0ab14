#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace semibayes {

// Standard-normal cdf/quantile used by the truncated-normal sampler and tests.
double norm_cdf(double z);
double norm_quantile(double p);  // inverse of norm_cdf, refined to ~1e-15

// splitmix64-based mixing for deriving independent seeds from a master seed
// (per chain, per grid cell, per replicate).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

// Deterministic sampler wrapping mt19937_64. All non-uniform draws are
// implemented here (not std::*_distribution) so that a given seed produces
// the same stream on every platform/build we target.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); never returns 0 (safe for log()).
  double uniform_pos();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);

  double normal();  // standard normal (Marsaglia polar, cached pair)
  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential(double rate);  // mean 1/rate
  double gamma(double shape);       // unit scale, Marsaglia-Tsang
  double beta(double a, double b);

  // Inverse-Gaussian with mean mu and shape lambda (Michael-Schucany-Haas).
  double inverse_gaussian(double mu, double lambda);

  // Normal(mean, sd^2) conditioned on [lo, hi], by inverse-cdf.
  double truncated_normal(double mean, double sd, double lo, double hi);

  // Laplace with rate lambda (density lambda/2 * exp(-lambda|x|)).
  double laplace(double lambda);

 private:
  std::mt19937_64 gen_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace semibayes
