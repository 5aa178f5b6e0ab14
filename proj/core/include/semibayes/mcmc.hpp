#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semibayes/dataset.hpp"
#include "semibayes/mixture.hpp"
#include "semibayes/priors.hpp"
#include "semibayes/rng.hpp"
#include "semibayes/sparse_vector.hpp"

namespace semibayes {

struct McmcConfig {
  int iters = 6000;
  int burnin = 2000;
  int thin = 2;
  int chains = 1;
  std::uint64_t seed = 1;
  double move_add = 1.0;
  double move_delete = 1.0;
  double move_swap = 1.0;
  // When set, the error mixture is held fixed at this density (stick/atom
  // updates are skipped; allocations still refresh).
  std::optional<SymmetricNormalMixture> fix_eta;
  std::string support_proposal = "conditional";  // or "slab"
  // Support moves per sweep. Must not depend on the chain state: a
  // state-dependent repetition count (e.g. s+1) provably biases the
  // stationary law, so the schedule is a fixed constant.
  int support_moves_per_sweep = 8;
  double sigma_step = 0.3;  // RW step on log sigma
  int check_every = 100;    // cached-loglik drift check cadence

  void validate() const;
  std::string to_json_string() const;
  static McmcConfig from_json_string(const std::string& text);
};

// Augmented sampler state. Mirrored-atom representation: pair k carries
// (z_k, sigma_k) and weight w_k split over slots 2k (+z) and 2k+1 (-z);
// pairs with z == 0 use slot 2k only, with the full pair weight.
struct McmcState {
  std::vector<int> support;     // sorted active coordinate indices
  std::vector<double> values;   // theta on the support
  std::vector<double> tau;      // Laplace scale latents (prior variances)
  std::vector<double> sticks;   // V_1..V_K, last forced to 1
  std::vector<double> z;        // pair locations, |z| <= M
  std::vector<double> sigma;    // pair scales in [sigma1, sigma2]
  std::vector<int> alloc;       // per-observation slot in [0, 2K)
  Eigen::VectorXd resid;        // y - X theta
  double aug_loglik = 0.0;      // cached sum_i log N(resid_i; slot mean, slot sd)

  int num_pairs() const { return static_cast<int>(z.size()); }
  int active_size() const { return static_cast<int>(support.size()); }
  double slot_mean(int slot) const { return (slot & 1) ? -z[slot >> 1] : z[slot >> 1]; }
  double slot_sigma(int slot) const { return sigma[slot >> 1]; }

  std::vector<double> pair_weights() const;  // from sticks
  SparseVector theta(int p) const;
  SymmetricNormalMixture mixture() const;

  void recompute_residuals(const Dataset& data);
  double aug_loglik_recomputed() const;
};

enum class MoveType { kAdd = 0, kDelete = 1, kSwap = 2 };

struct MoveCounters {
  long attempts[3] = {0, 0, 0};
  long accepts[3] = {0, 0, 0};
};

struct Draw {
  int iter = 0;
  SparseVector theta;
  std::vector<MixtureAtom> atoms;  // mixture summary at the draw
  double loglik = 0.0;             // mixture log-likelihood L_n(theta, eta)
};

struct Chain {
  std::vector<Draw> draws;
  MoveCounters counters;
  std::uint64_t seed = 0;
  std::string config_json;
  int n = 0;
  int p = 0;
};

struct ModelWeightTable {
  std::map<std::vector<int>, double> entries;
  std::string source = "mcmc";  // "mcmc" | "what-hat"

  void validate() const;  // weights >= 0, sum to 1 within 1e-9
};

// Total variation 0.5 * sum |w_a - w_b| over the union of supports.
double tv_distance(const ModelWeightTable& a, const ModelWeightTable& b);

// --- sweep components (exposed for unit tests and the Geweke check) ---

// Per-slot log allocation probabilities (unnormalized) for one residual.
std::vector<double> allocation_log_probs(const McmcState& state, double residual);

void update_allocations(McmcState& state, const Dataset& data, Rng& rng);
void update_sticks(McmcState& state, double alpha0, Rng& rng);
void update_atoms(McmcState& state, const Dataset& data, const PriorConfig& prior, Rng& rng,
                  double sigma_step);

// Gaussian full conditional of theta on the active set given allocations.
struct CoefConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
CoefConditional coef_conditional(const McmcState& state, const Dataset& data);

// Conditional least-squares proposal for coordinate j given the current
// allocations; nullopt when the standardized column has no information
// (callers fall back to the slab itself as proposal).
std::optional<std::pair<double, double>> add_proposal_params(const McmcState& state,
                                                             const Dataset& data, int j);

// Log MH acceptance ratios for the support moves (pure; no state change).
double support_log_alpha_add(const McmcState& state, const Dataset& data,
                             const PriorConfig& prior, const McmcConfig& cfg, int j, double v);
double support_log_alpha_delete(const McmcState& state, const Dataset& data,
                                const PriorConfig& prior, const McmcConfig& cfg, int j);

// One add/delete/swap attempt; returns the move type tried and whether it
// was accepted. Draws the new tau from its conditional on accept.
std::pair<MoveType, bool> update_support(McmcState& state, const Dataset& data,
                                         const PriorConfig& prior, const McmcConfig& cfg,
                                         Rng& rng);

void update_coefficients(McmcState& state, const Dataset& data, Rng& rng);
void update_tau(McmcState& state, double lambda, Rng& rng);

// Draws a full state from the augmented prior (theta, tau, sticks, atoms,
// allocations); residuals/caches are left for the caller to initialize
// against actual responses.
McmcState prior_state(const Dataset& data, const PriorConfig& prior, const McmcConfig& cfg,
                      Rng& rng);

// Replaces data.y by a draw from p(y | state) (Geweke data step).
void sample_responses(McmcState& state, Dataset& data, Rng& rng);

// One full sweep: allocations, sticks, atoms, (s+1) support moves,
// coefficients, tau. iter is used for the periodic drift check.
void mcmc_sweep(McmcState& state, const Dataset& data, const PriorConfig& prior,
                const McmcConfig& cfg, Rng& rng, MoveCounters& counters, int iter);

Chain run_mcmc(const Dataset& data, const PriorConfig& prior, const McmcConfig& cfg,
               std::uint64_t seed);

// cfg.chains independent chains (seeds derived from cfg.seed), merged table.
struct MultiChainResult {
  std::vector<Chain> chains;
  ModelWeightTable merged_weights;
};
MultiChainResult run_chains(const Dataset& data, const PriorConfig& prior,
                            const McmcConfig& cfg, int threads = 1);

ModelWeightTable model_weights(const Chain& chain);
ModelWeightTable model_weights(const std::vector<Draw>& draws);

// JSON-lines persistence, one record per kept draw.
void write_samples_jsonl(const Chain& chain, const std::string& path);
std::vector<Draw> read_samples_jsonl(const std::string& path, int p);

std::string support_to_string(const std::vector<int>& support);  // "1;4;7", "" for empty

}  // namespace semibayes
