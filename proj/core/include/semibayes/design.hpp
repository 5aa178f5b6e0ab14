#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semibayes/dataset.hpp"
#include "semibayes/mcmc.hpp"
#include "semibayes/mixture.hpp"
#include "semibayes/quadrature.hpp"
#include "semibayes/sparse_vector.hpp"

namespace semibayes {

// Sigma = (1/n) X'X with its dimensions; symmetric within 1e-12 and PSD
// (min eigenvalue >= -1e-10), both checked at construction.
struct GramSummary {
  Eigen::MatrixXd Sigma;
  int n = 0;
  int p = 0;

  static GramSummary from_design(const Eigen::MatrixXd& X);
  static GramSummary from_matrix(Eigen::MatrixXd Sigma, int n);
  void validate() const;
};

// Work limits for the exact certificate solvers. Exceeding either bound
// throws budget_exceeded; callers may fall back to the randomized
// upper-bound searches below.
struct CertBudget {
  int s_max = 12;
  double max_ops = 5e7;
};

// phi(s): uniform compatibility number. Exact combinatorial minimum via
// support enumeration, orthant (sign) enumeration and KKT solves over the
// simplex faces.
double compatibility_number(const GramSummary& gram, int s, const CertBudget& budget = {});

// psi(s): restricted eigenvalue; exact minimum of lambda_min over size-s
// principal submatrices.
double restricted_eigenvalue(const GramSummary& gram, int s, const CertBudget& budget = {});

// Randomized upper bounds (flagged inexact): multistart projected gradient
// over random sign orthants / random principal submatrices.
double compatibility_number_randomized(const GramSummary& gram, int s, int restarts,
                                       std::uint64_t seed);
double restricted_eigenvalue_randomized(const GramSummary& gram, int s, int draws,
                                        std::uint64_t seed);

struct DesignTableRow {
  int s = 0;
  double phi = 0.0;
  double psi = 0.0;
  bool exact = true;
};

// Rows for s = 1..s_max; on budget overrun either switches to the randomized
// bounds (allow_randomized) or rethrows budget_exceeded.
std::vector<DesignTableRow> design_table(const GramSummary& gram, int s_max,
                                         bool allow_randomized, const CertBudget& budget = {},
                                         std::uint64_t seed = 1);

// |integral of ell_dot_eta * eta0| over the grid; the score-centering term of
// G_n, which symmetry makes zero. Callers assert it rather than assume it.
double score_oddness_residual(const SymmetricNormalMixture& eta,
                              const SymmetricNormalMixture& eta0, const QuadratureGrid& grid);

// G_{n,S}: n^{-1/2} sum_i ell_dot_eta(eps_i) x_{i,S} at the true theta0.
// Requires data.truth; throws numeric_error if the oddness check fails.
Eigen::VectorXd efficient_score(const Dataset& data, const SymmetricNormalMixture& eta,
                                const std::vector<int>& S, const QuadratureGrid& grid);

// V_{n,S} = v * Sigma_S.
Eigen::MatrixXd info_matrix(const GramSummary& gram, double v, const std::vector<int>& S);

// Closed-form approximate model weights (Laplace-style), normalized over the
// given collection; log-space throughout.
ModelWeightTable hat_w(const Dataset& data, const PriorConfig& prior,
                       const SymmetricNormalMixture& eta0,
                       const std::vector<std::vector<int>>& collection,
                       const QuadratureGrid& grid);

// Misspecified-LAN remainder r_n(theta, eta) at the dataset's truth.
double lan_remainder(const SparseVector& theta, const SymmetricNormalMixture& eta,
                     const Dataset& data, const QuadratureGrid& grid);

struct BvmComponent {
  std::vector<int> S;
  Eigen::VectorXd center;     // Delta_{n,S} = V^{-1} G
  Eigen::MatrixXd precision;  // V_{n,S}, symmetric positive definite
  double weight = 0.0;
};

std::vector<BvmComponent> bvm_approximant(const Dataset& data, const ModelWeightTable& weights,
                                          const SymmetricNormalMixture& eta0,
                                          const QuadratureGrid& grid);

struct BvmModelDiag {
  std::vector<int> S;
  double tv = 0.0;
  long draws = 0;
  bool skipped = false;  // < min_draws or missing component: counted as full discrepancy
};

struct BvmReport {
  double surrogate_tv = 0.0;  // 2 * weight_tv + sum_S w_S * tv_S
  double weight_tv = 0.0;     // 0.5 * sum |w_mcmc - w_approx|
  std::vector<BvmModelDiag> per_model;

  std::string to_json_string() const;
};

// Moment-matched Pinsker surrogate for d_V between the chain's law of
// h_S = sqrt(n)(theta_S - theta0_S) and the normal mixture approximant.
BvmReport tv_surrogate(const std::vector<Draw>& draws, const std::vector<BvmComponent>& approx,
                       const SparseVector& theta0, int n, int min_draws = 30);

// Free calibration constants of the rate theory; never fitted to the paper.
struct RateConstants {
  double K_dim = 1.0;
  double K_Hel = 1.0;
  double K_theta = 1.0;
  double K_eta = 1.0;
  double K_sel = 1.0;

  double s_n(int n, int s0) const;  // 2 K_dim max(s0, (log n)^2)
  void validate() const;
};

// min nonzero |theta0_i| > (K_theta / psi_s) sqrt(s_n log p / n); vacuously
// true for the zero vector.
bool beta_min_check(const SparseVector& theta0, double psi_s, const RateConstants& rc, int n,
                    int p, double s_n);

}  // namespace semibayes
