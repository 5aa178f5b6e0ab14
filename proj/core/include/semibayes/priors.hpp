#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semibayes/mixture.hpp"
#include "semibayes/rng.hpp"
#include "semibayes/sparse_vector.hpp"

namespace semibayes {

// Full prior configuration: Laplace slab scale lambda, dimension-prior decay
// exponent a (family pi_p(s) ~ p^{-a s}), ratio-condition constants A1..A4,
// DP concentration alpha0, base-measure box [-M,M] x [sigma1,sigma2], and the
// stick-breaking truncation K.
struct PriorConfig {
  double lambda = 1.0;
  double dim_prior_a = 1.0;
  double A1 = 1.0;
  double A2 = 1.0;
  double A3 = 1.0;  // defaults to dim_prior_a when loaded from JSON
  double A4 = 1.0;
  double alpha0 = 1.0;
  double M = 3.0;
  double sigma1 = 0.5;
  double sigma2 = 2.0;
  int K = 30;

  void validate() const;

  std::string to_json_string() const;
  static PriorConfig from_json_string(const std::string& text);
};

// log pi_p(s) for the default family pi_p(s) ~ p^{-a s} normalized over
// s in {0..p}. Throws invalid_input when s is outside [0, p].
double log_pi_p(int s, int p, const PriorConfig& cfg);

// The defining ratio log pi_p(s) - log pi_p(s-1) = -a log p, exact by
// construction; the sampler's dimension moves use this form.
double log_pi_p_ratio(int p, const PriorConfig& cfg);

// Checks the sandwich A1 p^{-A3} <= pi_p(s)/pi_p(s-1) <= A2 p^{-A4} on the
// grid s = 1..p for an arbitrary registered family given by its log weights.
bool pi_p_ratio_condition_holds(const std::function<double(int)>& log_pi, int p,
                                const PriorConfig& cfg, double rel_tol = 1e-9);

// Warning gate sqrt(n)/p <= lambda <= sqrt(n log p), boundaries inclusive.
bool validate_lambda(double lambda, int n, int p);

// sum_j [log(lambda/2) - lambda |theta_j|]; empty product gives 0.
double log_slab(const std::vector<double>& theta_values, double lambda);

// log pi_p(s) - log C(p, s) + log_slab(values, lambda); binomial via lgamma.
double log_prior_theta(const SparseVector& theta, int p, const PriorConfig& cfg);

// Draws a sparse theta from the spike-and-slab prior (dimension, support,
// Laplace values); used by prior-predictive checks.
SparseVector sample_prior_theta(int p, const PriorConfig& cfg, Rng& rng);

// Deterministic assembly of the symmetrized mixture from stick variables
// V_1..V_K (V_K treated as 1) and atom parameters; zero-weight sticks are
// dropped, remaining pairs are mirrored with half weight each.
SymmetricNormalMixture mixture_from_sticks(const std::vector<double>& sticks,
                                           const std::vector<double>& locations,
                                           const std::vector<double>& sigmas);

// Truncated stick-breaking draw from the symmetrized DP prior.
SymmetricNormalMixture sample_symmetrized_dp(const PriorConfig& cfg, Rng& rng);

}  // namespace semibayes
