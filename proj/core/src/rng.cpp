#include "semibayes/rng.hpp"

#include <cmath>
#include <limits>

#include "semibayes/common.hpp"

namespace semibayes {

double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

namespace {

// Acklam's rational approximation, then one Halley step against erfc.
double norm_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw invalid_input("norm_quantile: p outside [0,1]");
  }
  double x = norm_quantile_approx(p);
  // Halley refinement: e = Phi(x) - p, u = e / phi(x).
  for (int it = 0; it < 2; ++it) {
    const double e = norm_cdf(x) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    if (pdf <= 0.0) break;
    const double u = e / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(seed, a), b);
}

double Rng::uniform_pos() {
  double u = uniform();
  while (u <= 0.0) u = uniform();
  return u;
}

std::size_t Rng::uniform_index(std::size_t n) {
  // Rejection to avoid modulo bias; n is tiny in all callers.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = gen_();
  while (v >= limit) v = gen_();
  return static_cast<std::size_t>(v % n);
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_normal_ = true;
  return u * f;
}

double Rng::exponential(double rate) { return -std::log(uniform_pos()) / rate; }

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^{1/a}.
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_pos(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

double Rng::inverse_gaussian(double mu, double lambda) {
  const double nu = normal();
  const double y = nu * nu;
  const double x =
      mu + mu * mu * y / (2.0 * lambda) -
      mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
  const double u = uniform();
  double out = (u <= mu / (mu + x)) ? x : mu * mu / x;
  if (!(out > 0.0) || !std::isfinite(out)) out = mu;  // extreme-parameter guard
  return out;
}

double Rng::truncated_normal(double mean, double sd, double lo, double hi) {
  if (!(lo < hi)) throw invalid_input("truncated_normal: empty interval");
  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  const double fa = norm_cdf(a);
  const double fb = norm_cdf(b);
  if (fb - fa < 1e-14) {
    // Nearly all mass outside [lo,hi]; the conditional is essentially a point
    // at the closer endpoint. Sample uniformly in a sliver against losing
    // ergodicity to a degenerate draw.
    return (std::abs(a) < std::abs(b)) ? lo + 1e-12 * (hi - lo) * uniform()
                                       : hi - 1e-12 * (hi - lo) * uniform();
  }
  const double u = fa + (fb - fa) * uniform();
  double z = norm_quantile(std::min(std::max(u, 1e-300), 1.0 - 1e-16));
  z = std::min(std::max(z, a), b);
  return mean + sd * z;
}

double Rng::laplace(double lambda) {
  const double u = uniform_pos() - 0.5;
  const double mag = -std::log(1.0 - 2.0 * std::abs(u)) / lambda;
  return u >= 0.0 ? mag : -mag;
}

}  // namespace semibayes
