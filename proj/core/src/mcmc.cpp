#include "semibayes/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "semibayes/common.hpp"
#include "semibayes/divergences.hpp"
#include "semibayes/log.hpp"
#include "semibayes/parallel.hpp"

namespace semibayes {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_normal_pdf(double x, double mean, double sd) {
  const double u = (x - mean) / sd;
  return -kLogSqrt2Pi - std::log(sd) - 0.5 * u * u;
}

inline double log_slab_pdf(double v, double lambda) {
  return std::log(lambda / 2.0) - lambda * std::abs(v);
}

double draw_tau(double lambda, double value, Rng& rng) {
  const double mu = lambda / std::max(std::abs(value), 1e-10);
  const double inv = rng.inverse_gaussian(mu, lambda * lambda);
  return 1.0 / inv;
}

// Decompose a symmetric mixture into mirrored pairs (|z|, sigma, pair weight).
void pairs_from_mixture(const SymmetricNormalMixture& mix, std::vector<double>& z,
                        std::vector<double>& sigma, std::vector<double>& w) {
  z.clear();
  sigma.clear();
  w.clear();
  const auto& atoms = mix.atoms();
  std::vector<bool> used(atoms.size(), false);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (used[i]) continue;
    if (atoms[i].z == 0.0) {
      z.push_back(0.0);
      sigma.push_back(atoms[i].sigma);
      w.push_back(atoms[i].w);
      used[i] = true;
      continue;
    }
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (used[j]) continue;
      if (atoms[j].z == -atoms[i].z && atoms[j].sigma == atoms[i].sigma &&
          atoms[j].w == atoms[i].w) {
        z.push_back(std::abs(atoms[i].z));
        sigma.push_back(atoms[i].sigma);
        w.push_back(2.0 * atoms[i].w);
        used[i] = used[j] = true;
        break;
      }
    }
  }
}

// Stick variables reproducing the given pair weights (last stick = 1).
std::vector<double> sticks_from_weights(const std::vector<double>& w) {
  std::vector<double> sticks(w.size(), 1.0);
  double remaining = 1.0;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    sticks[k] = remaining > 0.0 ? std::min(1.0, w[k] / remaining) : 0.0;
    remaining -= w[k];
  }
  return sticks;
}

}  // namespace

void McmcConfig::validate() const {
  if (iters < 1) throw invalid_input("mcmc: iters must be >= 1");
  if (burnin < 0 || burnin >= iters) throw invalid_input("mcmc: need 0 <= burnin < iters");
  if (thin < 1) throw invalid_input("mcmc: thin must be >= 1");
  if (chains < 1) throw invalid_input("mcmc: chains must be >= 1");
  if (move_add < 0 || move_delete < 0 || move_swap < 0 ||
      move_add + move_delete + move_swap <= 0)
    throw invalid_input("mcmc: move weights must be nonnegative with positive sum");
  if (support_proposal != "conditional" && support_proposal != "slab")
    throw invalid_input("mcmc: support_proposal must be 'conditional' or 'slab'");
  if (support_moves_per_sweep < 1)
    throw invalid_input("mcmc: support_moves_per_sweep must be >= 1");
  if (sigma_step <= 0) throw invalid_input("mcmc: sigma_step must be positive");
  if (check_every < 1) throw invalid_input("mcmc: check_every must be >= 1");
}

std::string McmcConfig::to_json_string() const {
  nlohmann::json j;
  j["iters"] = iters;
  j["burnin"] = burnin;
  j["thin"] = thin;
  j["chains"] = chains;
  j["seed"] = seed;
  j["moves"] = {{"add", move_add}, {"delete", move_delete}, {"swap", move_swap}};
  j["support_proposal"] = support_proposal;
  j["support_moves_per_sweep"] = support_moves_per_sweep;
  j["sigma_step"] = sigma_step;
  j["check_every"] = check_every;
  if (fix_eta) j["fix_eta"] = nlohmann::json::parse(fix_eta->to_json_string());
  return j.dump();
}

McmcConfig McmcConfig::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("mcmc JSON parse error: ") + e.what());
  }
  McmcConfig cfg;
  try {
    if (j.contains("iters")) cfg.iters = j["iters"].get<int>();
    if (j.contains("burnin")) cfg.burnin = j["burnin"].get<int>();
    if (j.contains("thin")) cfg.thin = j["thin"].get<int>();
    if (j.contains("chains")) cfg.chains = j["chains"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("moves")) {
      const auto& m = j["moves"];
      if (m.contains("add")) cfg.move_add = m["add"].get<double>();
      if (m.contains("delete")) cfg.move_delete = m["delete"].get<double>();
      if (m.contains("swap")) cfg.move_swap = m["swap"].get<double>();
    }
    if (j.contains("support_proposal"))
      cfg.support_proposal = j["support_proposal"].get<std::string>();
    if (j.contains("support_moves_per_sweep"))
      cfg.support_moves_per_sweep = j["support_moves_per_sweep"].get<int>();
    if (j.contains("sigma_step")) cfg.sigma_step = j["sigma_step"].get<double>();
    if (j.contains("check_every")) cfg.check_every = j["check_every"].get<int>();
    if (j.contains("fix_eta"))
      cfg.fix_eta = SymmetricNormalMixture::from_json_string(j["fix_eta"].dump());
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("mcmc JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::vector<double> McmcState::pair_weights() const {
  std::vector<double> w(sticks.size(), 0.0);
  double remaining = 1.0;
  for (std::size_t k = 0; k < sticks.size(); ++k) {
    const double v = (k + 1 == sticks.size()) ? 1.0 : sticks[k];
    w[k] = remaining * v;
    remaining *= (1.0 - v);
  }
  return w;
}

SparseVector McmcState::theta(int p) const { return SparseVector(p, support, values); }

SymmetricNormalMixture McmcState::mixture() const {
  return mixture_from_sticks(sticks, z, sigma);
}

void McmcState::recompute_residuals(const Dataset& data) {
  resid = data.y;
  for (std::size_t k = 0; k < support.size(); ++k)
    resid -= values[k] * data.X.col(support[k]);
}

double McmcState::aug_loglik_recomputed() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < resid.size(); ++i) {
    const int slot = alloc[static_cast<std::size_t>(i)];
    s += log_normal_pdf(resid[i], slot_mean(slot), slot_sigma(slot));
  }
  return s;
}

void ModelWeightTable::validate() const {
  double total = 0.0;
  for (const auto& [support, w] : entries) {
    if (w < 0.0) throw invalid_input("weight table: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw invalid_input("weight table: weights must sum to 1");
}

double tv_distance(const ModelWeightTable& a, const ModelWeightTable& b) {
  double s = 0.0;
  for (const auto& [key, w] : a.entries) {
    const auto it = b.entries.find(key);
    s += std::abs(w - (it == b.entries.end() ? 0.0 : it->second));
  }
  for (const auto& [key, w] : b.entries)
    if (a.entries.find(key) == a.entries.end()) s += w;
  return 0.5 * s;
}

std::vector<double> allocation_log_probs(const McmcState& state, double residual) {
  const auto w = state.pair_weights();
  const int K = state.num_pairs();
  std::vector<double> lp(static_cast<std::size_t>(2 * K), kNegInf);
  for (int k = 0; k < K; ++k) {
    if (w[static_cast<std::size_t>(k)] <= 0.0) continue;
    const double lw = std::log(w[static_cast<std::size_t>(k)]);
    if (state.z[static_cast<std::size_t>(k)] == 0.0) {
      lp[static_cast<std::size_t>(2 * k)] =
          lw + log_normal_pdf(residual, 0.0, state.sigma[static_cast<std::size_t>(k)]);
    } else {
      const double half = lw - M_LN2;
      lp[static_cast<std::size_t>(2 * k)] =
          half + log_normal_pdf(residual, state.z[static_cast<std::size_t>(k)],
                                state.sigma[static_cast<std::size_t>(k)]);
      lp[static_cast<std::size_t>(2 * k + 1)] =
          half + log_normal_pdf(residual, -state.z[static_cast<std::size_t>(k)],
                                state.sigma[static_cast<std::size_t>(k)]);
    }
  }
  return lp;
}

void update_allocations(McmcState& state, const Dataset& data, Rng& rng) {
  const int K = state.num_pairs();
  const auto w = state.pair_weights();
  // Per-pair constants for the hot loop.
  std::vector<double> lw(static_cast<std::size_t>(K)), inv2s2(static_cast<std::size_t>(K)),
      lsig(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double wk = w[static_cast<std::size_t>(k)];
    lw[static_cast<std::size_t>(k)] = wk > 0.0 ? std::log(wk) : kNegInf;
    const double s = state.sigma[static_cast<std::size_t>(k)];
    inv2s2[static_cast<std::size_t>(k)] = 0.5 / (s * s);
    lsig[static_cast<std::size_t>(k)] = std::log(s);
  }
  std::vector<double> lp(static_cast<std::size_t>(2 * K));
  std::vector<double> pr(static_cast<std::size_t>(2 * K));
  double total_ll = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double r = state.resid[i];
    double m = kNegInf;
    for (int k = 0; k < K; ++k) {
      const std::size_t sk = static_cast<std::size_t>(k);
      if (lw[sk] == kNegInf) {
        lp[2 * sk] = lp[2 * sk + 1] = kNegInf;
        continue;
      }
      const double zk = state.z[sk];
      const double base = -kLogSqrt2Pi - lsig[sk];
      if (zk == 0.0) {
        lp[2 * sk] = lw[sk] + base - r * r * inv2s2[sk];
        lp[2 * sk + 1] = kNegInf;
      } else {
        const double dp = r - zk;
        const double dm = r + zk;
        lp[2 * sk] = lw[sk] - M_LN2 + base - dp * dp * inv2s2[sk];
        lp[2 * sk + 1] = lw[sk] - M_LN2 + base - dm * dm * inv2s2[sk];
      }
      m = std::max(m, std::max(lp[2 * sk], lp[2 * sk + 1]));
    }
    double total = 0.0;
    for (int s = 0; s < 2 * K; ++s) {
      const std::size_t ss = static_cast<std::size_t>(s);
      pr[ss] = lp[ss] == kNegInf ? 0.0 : std::exp(lp[ss] - m);
      total += pr[ss];
    }
    double u = rng.uniform() * total;
    int pick = -1;
    for (int s = 0; s < 2 * K; ++s) {
      u -= pr[static_cast<std::size_t>(s)];
      if (u < 0.0) {
        pick = s;
        break;
      }
    }
    if (pick < 0)
      for (int s = 2 * K - 1; s >= 0; --s)
        if (pr[static_cast<std::size_t>(s)] > 0.0) {
          pick = s;
          break;
        }
    state.alloc[static_cast<std::size_t>(i)] = pick;
    total_ll += log_normal_pdf(r, state.slot_mean(pick), state.slot_sigma(pick));
  }
  state.aug_loglik = total_ll;
}

void update_sticks(McmcState& state, double alpha0, Rng& rng) {
  const int K = state.num_pairs();
  std::vector<long> counts(static_cast<std::size_t>(K), 0);
  for (int slot : state.alloc) counts[static_cast<std::size_t>(slot >> 1)]++;
  std::vector<long> tail(static_cast<std::size_t>(K), 0);
  long acc = 0;
  for (int k = K - 1; k >= 0; --k) {
    tail[static_cast<std::size_t>(k)] = acc;
    acc += counts[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k + 1 < K; ++k)
    state.sticks[static_cast<std::size_t>(k)] =
        rng.beta(1.0 + counts[static_cast<std::size_t>(k)],
                 alpha0 + tail[static_cast<std::size_t>(k)]);
  state.sticks[static_cast<std::size_t>(K - 1)] = 1.0;
}

void update_atoms(McmcState& state, const Dataset& data, const PriorConfig& prior, Rng& rng,
                  double sigma_step) {
  const int K = state.num_pairs();
  std::vector<long> m(static_cast<std::size_t>(K), 0);
  std::vector<double> ssum(static_cast<std::size_t>(K), 0.0);
  for (int i = 0; i < data.n(); ++i) {
    const int slot = state.alloc[static_cast<std::size_t>(i)];
    const std::size_t k = static_cast<std::size_t>(slot >> 1);
    const double r = (slot & 1) ? -state.resid[i] : state.resid[i];
    m[k]++;
    ssum[k] += r;
  }
  // z | rest: uniform prior times Gaussian likelihood, truncated to [-M, M].
  for (int k = 0; k < K; ++k) {
    const std::size_t sk = static_cast<std::size_t>(k);
    if (m[sk] == 0) {
      state.z[sk] = rng.uniform(-prior.M, prior.M);
      state.sigma[sk] = rng.uniform(prior.sigma1, prior.sigma2);
    } else {
      const double mean = ssum[sk] / m[sk];
      const double sd = state.sigma[sk] / std::sqrt(static_cast<double>(m[sk]));
      state.z[sk] = rng.truncated_normal(mean, sd, -prior.M, prior.M);
    }
  }
  // sigma | rest: random-walk Metropolis on log sigma with the uniform-box
  // prior (Jacobian term e^u) and the pooled Gaussian likelihood.
  std::vector<double> ss(static_cast<std::size_t>(K), 0.0);
  for (int i = 0; i < data.n(); ++i) {
    const int slot = state.alloc[static_cast<std::size_t>(i)];
    const std::size_t k = static_cast<std::size_t>(slot >> 1);
    const double r = (slot & 1) ? -state.resid[i] : state.resid[i];
    const double d = r - state.z[k];
    ss[k] += d * d;
  }
  for (int k = 0; k < K; ++k) {
    const std::size_t sk = static_cast<std::size_t>(k);
    if (m[sk] == 0) continue;  // already refreshed from the prior
    const double u0 = std::log(state.sigma[sk]);
    const double u1 = u0 + sigma_step * rng.normal();
    const double s1 = std::exp(u1);
    if (s1 < prior.sigma1 || s1 > prior.sigma2) continue;  // truncation: reject
    const double s0 = state.sigma[sk];
    const double delta = static_cast<double>(m[sk]) * (u0 - u1) +
                         ss[sk] * (0.5 / (s0 * s0) - 0.5 / (s1 * s1)) + (u1 - u0);
    if (std::log(rng.uniform_pos()) < delta) state.sigma[sk] = s1;
  }
  state.aug_loglik = state.aug_loglik_recomputed();
}

namespace {

// Normal equations of the standardized regression on the active set:
// A = Xs'Xs + diag(1/tau), b = Xs'ys with rows scaled by 1/sigma_alloc and
// responses centered at the allocated atom mean.
void normal_equations(const McmcState& state, const Dataset& data, Eigen::MatrixXd& A,
                      Eigen::VectorXd& b) {
  const int s = state.active_size();
  Eigen::MatrixXd Xs(data.n(), s);
  Eigen::VectorXd ys(data.n());
  for (int i = 0; i < data.n(); ++i) {
    const int slot = state.alloc[static_cast<std::size_t>(i)];
    const double sd = state.slot_sigma(slot);
    ys[i] = (data.y[i] - state.slot_mean(slot)) / sd;
    for (int c = 0; c < s; ++c)
      Xs(i, c) = data.X(i, state.support[static_cast<std::size_t>(c)]) / sd;
  }
  A = Xs.transpose() * Xs;
  for (int c = 0; c < s; ++c) A(c, c) += 1.0 / state.tau[static_cast<std::size_t>(c)];
  b = Xs.transpose() * ys;
}

Eigen::LLT<Eigen::MatrixXd> factor_with_jitter(Eigen::MatrixXd& A) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    // Collinear active columns: jitter the diagonal once and retry.
    A.diagonal().array() += 1e-10;
    llt.compute(A);
    if (llt.info() != Eigen::Success)
      throw numeric_error("update_coefficients: factorization failed on active columns");
  }
  return llt;
}

}  // namespace

CoefConditional coef_conditional(const McmcState& state, const Dataset& data) {
  const int s = state.active_size();
  CoefConditional out;
  if (s == 0) return out;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  normal_equations(state, data, A, b);
  const auto llt = factor_with_jitter(A);
  out.mean = llt.solve(b);
  out.cov = llt.solve(Eigen::MatrixXd::Identity(s, s));
  return out;
}

void update_coefficients(McmcState& state, const Dataset& data, Rng& rng) {
  const int s = state.active_size();
  if (s == 0) return;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  normal_equations(state, data, A, b);
  const auto llt = factor_with_jitter(A);
  const Eigen::VectorXd mu = llt.solve(b);
  Eigen::VectorXd zeta(s);
  for (int c = 0; c < s; ++c) zeta[c] = rng.normal();
  const Eigen::VectorXd theta =
      mu + llt.matrixU().solve(zeta);  // cov = A^{-1} = U^{-1} U^{-T}
  for (int c = 0; c < s; ++c) {
    double v = theta[c];
    if (v == 0.0) v = std::numeric_limits<double>::min();
    state.values[static_cast<std::size_t>(c)] = v;
  }
  state.recompute_residuals(data);
  state.aug_loglik = state.aug_loglik_recomputed();
}

void update_tau(McmcState& state, double lambda, Rng& rng) {
  for (std::size_t c = 0; c < state.values.size(); ++c)
    state.tau[c] = draw_tau(lambda, state.values[c], rng);
}

namespace {

// Flat evaluator of the current error mixture for the collapsed support
// moves: allocations are integrated out, so the move ratio and proposals
// must not depend on them.
struct MixEval {
  std::vector<double> c0;      // log w - log sigma - log sqrt(2 pi)
  std::vector<double> inv2s2;  // 1/(2 sigma^2)
  std::vector<double> mean;    // signed atom locations
  double variance = 1.0;

  explicit MixEval(const McmcState& state) {
    const auto w = state.pair_weights();
    for (int k = 0; k < state.num_pairs(); ++k) {
      const double wk = w[static_cast<std::size_t>(k)];
      if (wk <= 0.0) continue;
      const double sd = state.sigma[static_cast<std::size_t>(k)];
      const double zk = state.z[static_cast<std::size_t>(k)];
      const double base = -std::log(sd) - kLogSqrt2Pi;
      if (zk == 0.0) {
        c0.push_back(std::log(wk) + base);
        inv2s2.push_back(0.5 / (sd * sd));
        mean.push_back(0.0);
      } else {
        c0.push_back(std::log(wk / 2.0) + base);
        inv2s2.push_back(0.5 / (sd * sd));
        mean.push_back(zk);
        c0.push_back(std::log(wk / 2.0) + base);
        inv2s2.push_back(0.5 / (sd * sd));
        mean.push_back(-zk);
      }
    }
    double var = 0.0;
    for (int k = 0; k < state.num_pairs(); ++k) {
      const double wk = w[static_cast<std::size_t>(k)];
      if (wk <= 0.0) continue;
      const double sd = state.sigma[static_cast<std::size_t>(k)];
      const double zk = state.z[static_cast<std::size_t>(k)];
      var += wk * (zk * zk + sd * sd);
    }
    variance = var;
  }

  double ell(double r) const {
    double m = kNegInf;
    const std::size_t na = c0.size();
    for (std::size_t a = 0; a < na; ++a) {
      const double d = r - mean[a];
      const double t = c0[a] - d * d * inv2s2[a];
      if (t > m) m = t;
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      const double d = r - mean[a];
      acc += std::exp(c0[a] - d * d * inv2s2[a] - m);
    }
    return m + std::log(acc);
  }

  double loglik(const Eigen::VectorXd& resid) const {
    double total = 0.0;
    for (Eigen::Index i = 0; i < resid.size(); ++i) total += ell(resid[i]);
    return total;
  }
};

// Least-squares proposal on the raw residuals (allocation-free), with the
// mixture variance as the nominal noise level; residuals optionally shifted
// by +adj_v on column adj_col (the intermediate state of delete/swap moves).
std::optional<std::pair<double, double>> proposal_params(const MixEval& mix,
                                                         const McmcState& state,
                                                         const Dataset& data, int col,
                                                         int adj_col, double adj_v) {
  double A = 0.0, b = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double d = data.X(i, col);
    double r = state.resid[i];
    if (adj_col >= 0) r += adj_v * data.X(i, adj_col);
    A += d * d;
    b += d * r;
  }
  if (A < 1e-12) return std::nullopt;
  return std::make_pair(b / A, std::sqrt(mix.variance / A));
}

double log_q(const std::optional<std::pair<double, double>>& params, double v,
             const PriorConfig& prior, const McmcConfig& cfg) {
  if (cfg.support_proposal == "slab" || !params) return log_slab_pdf(v, prior.lambda);
  return log_normal_pdf(v, params->first, params->second);
}

// Change in the collapsed (mixture) log-likelihood if residuals move by -v on
// column add_col and +w on column del_col (columns < 0 are ignored).
double mix_delta(const MixEval& mix, const McmcState& state, const Dataset& data, int add_col,
                 double v, int del_col, double w) {
  double delta = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    double r = state.resid[i];
    const double before = mix.ell(r);
    if (add_col >= 0) r -= v * data.X(i, add_col);
    if (del_col >= 0) r += w * data.X(i, del_col);
    delta += mix.ell(r) - before;
  }
  return delta;
}

}  // namespace

std::optional<std::pair<double, double>> add_proposal_params(const McmcState& state,
                                                             const Dataset& data, int j) {
  const MixEval mix(state);
  return proposal_params(mix, state, data, j, -1, 0.0);
}

double support_log_alpha_add(const McmcState& state, const Dataset& data,
                             const PriorConfig& prior, const McmcConfig& cfg, int j, double v) {
  const MixEval mix(state);
  const double delta = mix_delta(mix, state, data, j, v, -1, 0.0);
  const double lq = log_q(proposal_params(mix, state, data, j, -1, 0.0), v, prior, cfg);
  return delta + log_pi_p_ratio(data.p(), prior) + log_slab_pdf(v, prior.lambda) - lq;
}

double support_log_alpha_delete(const McmcState& state, const Dataset& data,
                                const PriorConfig& prior, const McmcConfig& cfg, int j) {
  const auto it = std::find(state.support.begin(), state.support.end(), j);
  if (it == state.support.end()) throw invalid_input("support_log_alpha_delete: j not active");
  const double v = state.values[static_cast<std::size_t>(it - state.support.begin())];
  const MixEval mix(state);
  const double delta = mix_delta(mix, state, data, -1, 0.0, j, v);
  // Reverse add proposal evaluated at the post-delete residuals.
  const double lq = log_q(proposal_params(mix, state, data, j, j, v), v, prior, cfg);
  return delta - log_pi_p_ratio(data.p(), prior) + lq - log_slab_pdf(v, prior.lambda);
}

std::pair<MoveType, bool> update_support(McmcState& state, const Dataset& data,
                                         const PriorConfig& prior, const McmcConfig& cfg,
                                         Rng& rng) {
  const int p = data.p();
  const int s = state.active_size();
  const double total = cfg.move_add + cfg.move_delete + cfg.move_swap;
  const double u = rng.uniform() * total;
  MoveType type = MoveType::kAdd;
  if (u >= cfg.move_add) type = (u < cfg.move_add + cfg.move_delete) ? MoveType::kDelete
                                                                     : MoveType::kSwap;

  const MixEval mix(state);

  auto pick_complement = [&](std::size_t which) {
    // which-th index not in the (sorted) support.
    int j = 0;
    std::size_t seen = 0, si = 0;
    for (j = 0; j < p; ++j) {
      if (si < state.support.size() && state.support[si] == j) {
        ++si;
        continue;
      }
      if (seen == which) break;
      ++seen;
    }
    return j;
  };

  if (type == MoveType::kAdd) {
    if (s == p) return {type, false};  // no candidate coordinate
    const int j = pick_complement(rng.uniform_index(static_cast<std::size_t>(p - s)));
    const auto params = proposal_params(mix, state, data, j, -1, 0.0);
    double v;
    if (cfg.support_proposal == "slab" || !params) {
      v = rng.laplace(prior.lambda);
    } else {
      v = rng.normal(params->first, params->second);
    }
    if (v == 0.0) return {type, false};
    const double log_alpha = mix_delta(mix, state, data, j, v, -1, 0.0) +
                             log_pi_p_ratio(data.p(), prior) +
                             log_slab_pdf(v, prior.lambda) - log_q(params, v, prior, cfg);
    if (std::log(rng.uniform_pos()) < log_alpha) {
      const auto pos = std::lower_bound(state.support.begin(), state.support.end(), j);
      const std::size_t idx = static_cast<std::size_t>(pos - state.support.begin());
      state.support.insert(pos, j);
      state.values.insert(state.values.begin() + static_cast<std::ptrdiff_t>(idx), v);
      state.tau.insert(state.tau.begin() + static_cast<std::ptrdiff_t>(idx),
                       draw_tau(prior.lambda, v, rng));
      state.resid -= v * data.X.col(j);
      state.aug_loglik = state.aug_loglik_recomputed();
      return {type, true};
    }
    return {type, false};
  }

  if (type == MoveType::kDelete) {
    if (s == 0) return {type, false};
    const std::size_t idx = rng.uniform_index(static_cast<std::size_t>(s));
    const int j = state.support[idx];
    const double v = state.values[idx];
    const double log_alpha =
        mix_delta(mix, state, data, -1, 0.0, j, v) - log_pi_p_ratio(data.p(), prior) +
        log_q(proposal_params(mix, state, data, j, j, v), v, prior, cfg) -
        log_slab_pdf(v, prior.lambda);
    if (std::log(rng.uniform_pos()) < log_alpha) {
      state.support.erase(state.support.begin() + static_cast<std::ptrdiff_t>(idx));
      state.values.erase(state.values.begin() + static_cast<std::ptrdiff_t>(idx));
      state.tau.erase(state.tau.begin() + static_cast<std::ptrdiff_t>(idx));
      state.resid += v * data.X.col(j);
      state.aug_loglik = state.aug_loglik_recomputed();
      return {type, true};
    }
    return {type, false};
  }

  // Swap: remove j, insert k; both proposals evaluated at the intermediate
  // state without j so the move is exactly reversible.
  if (s == 0 || s == p) return {type, false};
  const std::size_t idx = rng.uniform_index(static_cast<std::size_t>(s));
  const int j = state.support[idx];
  const double vj = state.values[idx];
  const int k = pick_complement(rng.uniform_index(static_cast<std::size_t>(p - s)));
  const auto params_k = proposal_params(mix, state, data, k, j, vj);
  double vk;
  if (cfg.support_proposal == "slab" || !params_k) {
    vk = rng.laplace(prior.lambda);
  } else {
    vk = rng.normal(params_k->first, params_k->second);
  }
  if (vk == 0.0) return {type, false};
  const auto params_j = proposal_params(mix, state, data, j, j, vj);
  const double delta = mix_delta(mix, state, data, k, vk, j, vj);
  const double log_alpha = delta + log_slab_pdf(vk, prior.lambda) -
                           log_slab_pdf(vj, prior.lambda) +
                           log_q(params_j, vj, prior, cfg) - log_q(params_k, vk, prior, cfg);
  if (std::log(rng.uniform_pos()) < log_alpha) {
    state.support.erase(state.support.begin() + static_cast<std::ptrdiff_t>(idx));
    state.values.erase(state.values.begin() + static_cast<std::ptrdiff_t>(idx));
    state.tau.erase(state.tau.begin() + static_cast<std::ptrdiff_t>(idx));
    state.resid += vj * data.X.col(j);
    const auto pos = std::lower_bound(state.support.begin(), state.support.end(), k);
    const std::size_t kidx = static_cast<std::size_t>(pos - state.support.begin());
    state.support.insert(pos, k);
    state.values.insert(state.values.begin() + static_cast<std::ptrdiff_t>(kidx), vk);
    state.tau.insert(state.tau.begin() + static_cast<std::ptrdiff_t>(kidx),
                     draw_tau(prior.lambda, vk, rng));
    state.resid -= vk * data.X.col(k);
    state.aug_loglik = state.aug_loglik_recomputed();
    return {type, true};
  }
  return {type, false};
}

McmcState prior_state(const Dataset& data, const PriorConfig& prior, const McmcConfig& cfg,
                      Rng& rng) {
  McmcState state;
  if (cfg.fix_eta) {
    std::vector<double> w;
    pairs_from_mixture(*cfg.fix_eta, state.z, state.sigma, w);
    state.sticks = sticks_from_weights(w);
  } else {
    const std::size_t K = static_cast<std::size_t>(prior.K);
    state.sticks.resize(K);
    state.z.resize(K);
    state.sigma.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      state.sticks[k] = rng.beta(1.0, prior.alpha0);
      state.z[k] = rng.uniform(-prior.M, prior.M);
      state.sigma[k] = rng.uniform(prior.sigma1, prior.sigma2);
    }
    state.sticks[K - 1] = 1.0;
  }
  const SparseVector theta = sample_prior_theta(data.p(), prior, rng);
  state.support = theta.support();
  state.values = theta.values();
  state.tau.resize(state.values.size());
  for (std::size_t c = 0; c < state.values.size(); ++c)
    state.tau[c] = draw_tau(prior.lambda, state.values[c], rng);
  // Allocations from the stick weights (z == 0 pairs collapse to slot 2k).
  const auto w = state.pair_weights();
  state.alloc.resize(static_cast<std::size_t>(data.n()), 0);
  for (int i = 0; i < data.n(); ++i) {
    double u = rng.uniform();
    int pick = -1;
    for (int k = 0; k < state.num_pairs() && pick < 0; ++k) {
      const double wk = w[static_cast<std::size_t>(k)];
      if (wk <= 0.0) continue;
      if (state.z[static_cast<std::size_t>(k)] == 0.0) {
        if (u < wk)
          pick = 2 * k;
        else
          u -= wk;
      } else {
        if (u < wk / 2.0) {
          pick = 2 * k;
        } else {
          u -= wk / 2.0;
          if (u < wk / 2.0)
            pick = 2 * k + 1;
          else
            u -= wk / 2.0;
        }
      }
    }
    if (pick < 0)  // float leftover: last positive-weight pair
      for (int k = state.num_pairs() - 1; k >= 0 && pick < 0; --k)
        if (w[static_cast<std::size_t>(k)] > 0.0)
          pick = state.z[static_cast<std::size_t>(k)] == 0.0 ? 2 * k : 2 * k + 1;
    state.alloc[static_cast<std::size_t>(i)] = pick;
  }
  state.recompute_residuals(data);
  state.aug_loglik = state.aug_loglik_recomputed();
  return state;
}

void sample_responses(McmcState& state, Dataset& data, Rng& rng) {
  for (int i = 0; i < data.n(); ++i) {
    double dot = 0.0;
    for (std::size_t c = 0; c < state.support.size(); ++c)
      dot += data.X(i, state.support[c]) * state.values[c];
    const int slot = state.alloc[static_cast<std::size_t>(i)];
    data.y[i] = dot + state.slot_mean(slot) + state.slot_sigma(slot) * rng.normal();
  }
  state.recompute_residuals(data);
  state.aug_loglik = state.aug_loglik_recomputed();
}

void mcmc_sweep(McmcState& state, const Dataset& data, const PriorConfig& prior,
                const McmcConfig& cfg, Rng& rng, MoveCounters& counters, int iter) {
  update_allocations(state, data, rng);
  if (!cfg.fix_eta) {
    update_sticks(state, prior.alpha0, rng);
    update_atoms(state, data, prior, rng, cfg.sigma_step);
  }
  for (int r = 0; r < cfg.support_moves_per_sweep; ++r) {
    const auto [type, accepted] = update_support(state, data, prior, cfg, rng);
    counters.attempts[static_cast<int>(type)]++;
    if (accepted) counters.accepts[static_cast<int>(type)]++;
  }
  // The support moves are collapsed over allocations, so re-impute them
  // before the allocation-conditioned coefficient draw.
  update_allocations(state, data, rng);
  update_coefficients(state, data, rng);
  update_tau(state, prior.lambda, rng);
  if (!std::isfinite(state.aug_loglik))
    throw numeric_error("sampler: non-finite likelihood at iter " + std::to_string(iter) +
                        " (s=" + std::to_string(state.active_size()) + ")");
  if (iter % cfg.check_every == 0) {
    const double fresh = state.aug_loglik_recomputed();
    if (std::abs(fresh - state.aug_loglik) > 1e-8)
      throw numeric_error("sampler: cached loglik drift " +
                          std::to_string(std::abs(fresh - state.aug_loglik)) + " at iter " +
                          std::to_string(iter));
    state.aug_loglik = fresh;
  }
}

// Greedy forward screen on raw residuals for the chain start. Strong
// coordinates (squared-correlation gain above a BIC-style bar) enter with
// their running least-squares values. Initialization only places the chain;
// the stationary law is untouched.
std::pair<std::vector<int>, std::vector<double>> screen_initial_support(const Dataset& data,
                                                                        int max_k) {
  Eigen::VectorXd r = data.y;
  std::vector<int> support;
  std::vector<double> values;
  const double logp = std::log(static_cast<double>(data.p()));
  std::vector<double> col_sq(static_cast<std::size_t>(data.p()));
  for (int j = 0; j < data.p(); ++j)
    col_sq[static_cast<std::size_t>(j)] = data.X.col(j).squaredNorm();
  for (int k = 0; k < max_k; ++k) {
    int best = -1;
    double best_gain = 0.0, best_v = 0.0;
    for (int j = 0; j < data.p(); ++j) {
      if (col_sq[static_cast<std::size_t>(j)] < 1e-12) continue;
      if (std::find(support.begin(), support.end(), j) != support.end()) continue;
      const double dot = data.X.col(j).dot(r);
      const double gain = dot * dot / col_sq[static_cast<std::size_t>(j)];
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
        best_v = dot / col_sq[static_cast<std::size_t>(j)];
      }
    }
    const double noise_var = r.squaredNorm() / data.n();
    if (best < 0 || best_gain < 2.0 * logp * noise_var || best_v == 0.0) break;
    support.push_back(best);
    values.push_back(best_v);
    r -= best_v * data.X.col(best);
  }
  // Sort by index, keeping values aligned.
  std::vector<std::size_t> order(support.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  std::vector<int> s2(support.size());
  std::vector<double> v2(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    s2[i] = support[order[i]];
    v2[i] = values[order[i]];
  }
  return {std::move(s2), std::move(v2)};
}

Chain run_mcmc(const Dataset& data, const PriorConfig& prior, const McmcConfig& cfg,
               std::uint64_t seed) {
  data.validate();
  prior.validate();
  cfg.validate();
  if (cfg.fix_eta && !cfg.fix_eta->within_box(prior.M, prior.sigma1, prior.sigma2))
    logging::info("fix_eta mixture lies outside the prior box");
  Rng rng(seed);

  McmcState state = prior_state(data, prior, cfg, rng);
  // Deterministic start: greedy screen for clearly-supported coordinates
  // (otherwise empty support).
  {
    auto [sup, vals] = screen_initial_support(data, std::min(data.n() / 4, 32));
    state.support = std::move(sup);
    state.values = std::move(vals);
    state.tau.resize(state.values.size());
    for (std::size_t c = 0; c < state.values.size(); ++c)
      state.tau[c] = draw_tau(prior.lambda, state.values[c], rng);
    state.recompute_residuals(data);
    state.aug_loglik = state.aug_loglik_recomputed();
  }

  Chain chain;
  chain.seed = seed;
  chain.config_json = cfg.to_json_string();
  chain.n = data.n();
  chain.p = data.p();
  chain.draws.reserve(static_cast<std::size_t>((cfg.iters - cfg.burnin) / cfg.thin));

  for (int iter = 1; iter <= cfg.iters; ++iter) {
    mcmc_sweep(state, data, prior, cfg, rng, chain.counters, iter);
    if (logging::debug_enabled()) {
      std::ostringstream os;
      os << "sweep " << iter << " s=" << state.active_size() << " aug_ll=" << state.aug_loglik;
      logging::debug(os.str());
    }
    if (iter > cfg.burnin && (iter - cfg.burnin) % cfg.thin == 0) {
      Draw d;
      d.iter = iter;
      d.theta = state.theta(data.p());
      const SymmetricNormalMixture mix = state.mixture();
      d.atoms = mix.atoms();
      double ll = 0.0;
      for (int i = 0; i < data.n(); ++i) ll += mix.ell(state.resid[i]);
      d.loglik = ll;
      chain.draws.push_back(std::move(d));
    }
  }
  return chain;
}

MultiChainResult run_chains(const Dataset& data, const PriorConfig& prior,
                            const McmcConfig& cfg, int threads) {
  MultiChainResult out;
  out.chains.resize(static_cast<std::size_t>(cfg.chains));
  parallel_for(cfg.chains, threads, [&](int c) {
    out.chains[static_cast<std::size_t>(c)] =
        run_mcmc(data, prior, cfg, mix_seed(cfg.seed, static_cast<std::uint64_t>(c)));
  });
  std::map<std::vector<int>, double> counts;
  double total = 0.0;
  for (const auto& chain : out.chains)
    for (const auto& d : chain.draws) {
      counts[d.theta.support()] += 1.0;
      total += 1.0;
    }
  if (total == 0.0) throw invalid_input("run_chains: no kept draws");
  for (auto& [key, v] : counts) v /= total;
  out.merged_weights.entries = std::move(counts);
  out.merged_weights.source = "mcmc";
  return out;
}

ModelWeightTable model_weights(const std::vector<Draw>& draws) {
  if (draws.empty()) throw invalid_input("model_weights: empty chain");
  ModelWeightTable table;
  for (const auto& d : draws) table.entries[d.theta.support()] += 1.0;
  for (auto& [key, v] : table.entries) v /= static_cast<double>(draws.size());
  table.source = "mcmc";
  return table;
}

ModelWeightTable model_weights(const Chain& chain) { return model_weights(chain.draws); }

void write_samples_jsonl(const Chain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw invalid_input("cannot open for writing: " + path);
  for (const auto& d : chain.draws) {
    nlohmann::json j;
    j["iter"] = d.iter;
    j["support"] = d.theta.support();
    j["values"] = d.theta.values();
    j["atoms"] = nlohmann::json::array();
    for (const auto& a : d.atoms)
      j["atoms"].push_back({{"z", a.z}, {"sigma", a.sigma}, {"w", a.w}});
    j["loglik"] = d.loglik;
    out << j.dump() << "\n";
  }
}

std::vector<Draw> read_samples_jsonl(const std::string& path, int p) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open samples file: " + path);
  std::vector<Draw> draws;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      Draw d;
      d.iter = j.at("iter").get<int>();
      d.theta = SparseVector(p, j.at("support").get<std::vector<int>>(),
                             j.at("values").get<std::vector<double>>());
      for (const auto& a : j.at("atoms"))
        d.atoms.push_back(
            {a.at("z").get<double>(), a.at("sigma").get<double>(), a.at("w").get<double>()});
      d.loglik = j.at("loglik").get<double>();
      draws.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw invalid_input("samples JSONL line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return draws;
}

std::string support_to_string(const std::vector<int>& support) {
  std::string s;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(support[i]);
  }
  return s;
}

}  // namespace semibayes
