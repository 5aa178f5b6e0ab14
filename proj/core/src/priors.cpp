#include "semibayes/priors.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "semibayes/common.hpp"

namespace semibayes {

void PriorConfig::validate() const {
  if (!(lambda > 0.0)) throw invalid_input("prior: lambda must be positive");
  if (!(dim_prior_a > 0.0)) throw invalid_input("prior: dim_prior_a must be positive");
  if (!(A1 > 0.0 && A2 > 0.0 && A3 > 0.0 && A4 > 0.0))
    throw invalid_input("prior: A1..A4 must be positive");
  if (!(alpha0 > 0.0)) throw invalid_input("prior: alpha0 must be positive");
  if (!(M > 0.0)) throw invalid_input("prior: M must be positive");
  if (!(sigma1 > 0.0 && sigma1 < sigma2)) throw invalid_input("prior: need 0 < sigma1 < sigma2");
  if (K < 2) throw invalid_input("prior: K must be >= 2");
}

std::string PriorConfig::to_json_string() const {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["dim_prior_a"] = dim_prior_a;
  j["A1"] = A1;
  j["A2"] = A2;
  j["A3"] = A3;
  j["A4"] = A4;
  j["alpha0"] = alpha0;
  j["M"] = M;
  j["sigma1"] = sigma1;
  j["sigma2"] = sigma2;
  j["K"] = K;
  return j.dump();
}

PriorConfig PriorConfig::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("prior JSON parse error: ") + e.what());
  }
  PriorConfig cfg;
  try {
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("dim_prior_a")) cfg.dim_prior_a = j["dim_prior_a"].get<double>();
    cfg.A3 = cfg.A4 = cfg.dim_prior_a;
    if (j.contains("A1")) cfg.A1 = j["A1"].get<double>();
    if (j.contains("A2")) cfg.A2 = j["A2"].get<double>();
    if (j.contains("A3")) cfg.A3 = j["A3"].get<double>();
    if (j.contains("A4")) cfg.A4 = j["A4"].get<double>();
    if (j.contains("alpha0")) cfg.alpha0 = j["alpha0"].get<double>();
    if (j.contains("M")) cfg.M = j["M"].get<double>();
    if (j.contains("sigma1")) cfg.sigma1 = j["sigma1"].get<double>();
    if (j.contains("sigma2")) cfg.sigma2 = j["sigma2"].get<double>();
    if (j.contains("K")) cfg.K = j["K"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("prior JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

namespace {

// log sum_{s=0}^{p} r^s with r = p^{-a}, in log space.
double log_normalizer(int p, double a) {
  const double log_r = -a * std::log(static_cast<double>(p));
  if (log_r >= 0.0) return std::log(static_cast<double>(p) + 1.0);  // p == 1
  // log((1 - r^{p+1}) / (1 - r))
  const double log_r_top = static_cast<double>(p + 1) * log_r;
  return std::log1p(-std::exp(log_r_top)) - std::log1p(-std::exp(log_r));
}

}  // namespace

double log_pi_p(int s, int p, const PriorConfig& cfg) {
  if (s < 0 || s > p) throw invalid_input("log_pi_p: s outside [0, p]");
  return -cfg.dim_prior_a * s * std::log(static_cast<double>(p)) -
         log_normalizer(p, cfg.dim_prior_a);
}

double log_pi_p_ratio(int p, const PriorConfig& cfg) {
  return -cfg.dim_prior_a * std::log(static_cast<double>(p));
}

bool pi_p_ratio_condition_holds(const std::function<double(int)>& log_pi, int p,
                                const PriorConfig& cfg, double rel_tol) {
  const double logp = std::log(static_cast<double>(p));
  const double lo = std::log(cfg.A1) - cfg.A3 * logp;
  const double hi = std::log(cfg.A2) - cfg.A4 * logp;
  for (int s = 1; s <= p; ++s) {
    const double ratio = log_pi(s) - log_pi(s - 1);
    if (ratio < lo - rel_tol || ratio > hi + rel_tol) return false;
  }
  return true;
}

bool validate_lambda(double lambda, int n, int p) {
  const double lo = std::sqrt(static_cast<double>(n)) / p;
  const double hi = std::sqrt(n * std::log(static_cast<double>(p)));
  return lambda >= lo && lambda <= hi;
}

double log_slab(const std::vector<double>& theta_values, double lambda) {
  double s = 0.0;
  for (double v : theta_values) s += std::log(lambda / 2.0) - lambda * std::abs(v);
  return s;
}

double log_prior_theta(const SparseVector& theta, int p, const PriorConfig& cfg) {
  if (theta.dim() != p) throw invalid_input("log_prior_theta: theta dim != p");
  const int s = theta.nnz();
  const double log_binom =
      std::lgamma(p + 1.0) - std::lgamma(s + 1.0) - std::lgamma(p - s + 1.0);
  return log_pi_p(s, p, cfg) - log_binom + log_slab(theta.values(), cfg.lambda);
}

SparseVector sample_prior_theta(int p, const PriorConfig& cfg, Rng& rng) {
  // Dimension by inverse cdf over the geometric weights.
  const double u = rng.uniform();
  double acc = 0.0;
  int s = p;
  for (int k = 0; k <= p; ++k) {
    acc += std::exp(log_pi_p(k, p, cfg));
    if (u < acc) {
      s = k;
      break;
    }
  }
  // Support: Fisher-Yates prefix over 0..p-1.
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j;
  for (int k = 0; k < s; ++k) {
    const std::size_t pick = k + rng.uniform_index(static_cast<std::size_t>(p - k));
    std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
  }
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  std::vector<double> values(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) {
    double v = rng.laplace(cfg.lambda);
    while (v == 0.0) v = rng.laplace(cfg.lambda);
    values[static_cast<std::size_t>(k)] = v;
  }
  return SparseVector(p, std::move(idx), std::move(values));
}

SymmetricNormalMixture mixture_from_sticks(const std::vector<double>& sticks,
                                           const std::vector<double>& locations,
                                           const std::vector<double>& sigmas) {
  if (sticks.size() != locations.size() || sticks.size() != sigmas.size())
    throw invalid_input("mixture_from_sticks: length mismatch");
  const std::size_t K = sticks.size();
  std::vector<double> w(K, 0.0);
  double remaining = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double v = (k + 1 == K) ? 1.0 : sticks[k];  // last stick absorbs the remainder
    w[k] = remaining * v;
    remaining *= (1.0 - v);
  }
  std::vector<MixtureAtom> atoms;
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (w[k] <= 0.0) continue;
    if (locations[k] == 0.0) {
      atoms.push_back({0.0, sigmas[k], w[k]});
    } else {
      atoms.push_back({locations[k], sigmas[k], w[k] / 2.0});
      atoms.push_back({-locations[k], sigmas[k], w[k] / 2.0});
    }
    total += w[k];
  }
  for (auto& a : atoms) a.w /= total;
  return SymmetricNormalMixture(std::move(atoms));
}

SymmetricNormalMixture sample_symmetrized_dp(const PriorConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t K = static_cast<std::size_t>(cfg.K);
  std::vector<double> sticks(K), locations(K), sigmas(K);
  for (std::size_t k = 0; k < K; ++k) {
    // V ~ Beta(1, alpha0) by inverse cdf.
    sticks[k] = 1.0 - std::pow(rng.uniform_pos(), 1.0 / cfg.alpha0);
    locations[k] = rng.uniform(-cfg.M, cfg.M);
    sigmas[k] = rng.uniform(cfg.sigma1, cfg.sigma2);
  }
  sticks[K - 1] = 1.0;
  return mixture_from_sticks(sticks, locations, sigmas);
}

}  // namespace semibayes
