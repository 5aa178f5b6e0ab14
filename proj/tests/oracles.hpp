// Test-side oracles, independent of the library implementation paths they
// check: finite differences, dense likelihood evaluation, closed-form
// Gaussian identities, brute-force quadrature posteriors, random-search
// certificate bounds, and Kolmogorov-Smirnov helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "semibayes/dataset.hpp"
#include "semibayes/mcmc.hpp"
#include "semibayes/mixture.hpp"
#include "semibayes/priors.hpp"
#include "semibayes/quadrature.hpp"
#include "semibayes/rng.hpp"

namespace oracles {

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Dense-evaluation oracle for the log-likelihood: full-length theta, all
// columns visited in ascending order.
inline double dense_loglik(const std::vector<double>& theta_dense,
                           const semibayes::SymmetricNormalMixture& eta,
                           const semibayes::Dataset& data) {
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    double dot = 0.0;
    for (int j = 0; j < data.p(); ++j)
      dot += data.X(i, j) * theta_dense[static_cast<std::size_t>(j)];
    total += eta.ell(data.y[i] - dot);
  }
  return total;
}

// Closed-form squared Hellinger distance between N(m1,s1^2) and N(m2,s2^2).
inline double gaussian_hellinger_sq(double m1, double s1, double m2, double s2) {
  const double bc = std::sqrt(2.0 * s1 * s2 / (s1 * s1 + s2 * s2)) *
                    std::exp(-0.25 * (m1 - m2) * (m1 - m2) / (s1 * s1 + s2 * s2));
  return 2.0 * (1.0 - bc);
}

// Brute-force posterior over all 2^p supports for a Gaussian error model
// with fixed scale sigma: w_S ~ pi_p(s) C(p,s)^{-1} int g_S(t) prod_i
// N(y_i - x_i t; 0, sigma^2) dt, by tensor Gauss-Legendre quadrature.
// Practical for p <= 2 (used on the p=2 oracle fixture).
inline semibayes::ModelWeightTable quad_posterior_weights(const semibayes::Dataset& data,
                                                          const semibayes::PriorConfig& prior,
                                                          double sigma, double range = 12.0,
                                                          int nodes = 400) {
  using namespace semibayes;
  const int p = data.p();
  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre(nodes, gl_nodes, gl_weights);
  std::vector<double> t(static_cast<std::size_t>(nodes)), lw(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    t[static_cast<std::size_t>(k)] = range * gl_nodes[static_cast<std::size_t>(k)];
    lw[static_cast<std::size_t>(k)] = std::log(range * gl_weights[static_cast<std::size_t>(k)]);
  }
  const double log_norm = -0.5 * std::log(2.0 * M_PI) - std::log(sigma);
  auto loglik = [&](const std::vector<std::pair<int, double>>& coords) {
    double total = 0.0;
    for (int i = 0; i < data.n(); ++i) {
      double r = data.y[i];
      for (const auto& [j, v] : coords) r -= data.X(i, j) * v;
      total += log_norm - 0.5 * r * r / (sigma * sigma);
    }
    return total;
  };
  auto logsumexp_acc = [](std::vector<double>& terms) {
    const double m = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double v : terms) s += std::exp(v - m);
    return m + std::log(s);
  };

  std::map<std::vector<int>, double> logw;
  for (unsigned mask = 0; mask < (1u << p); ++mask) {
    std::vector<int> S;
    for (int j = 0; j < p; ++j)
      if (mask & (1u << j)) S.push_back(j);
    const int s = static_cast<int>(S.size());
    const double log_binom =
        std::lgamma(p + 1.0) - std::lgamma(s + 1.0) - std::lgamma(p - s + 1.0);
    double log_integral;
    if (s == 0) {
      log_integral = loglik({});
    } else if (s == 1) {
      std::vector<double> terms;
      for (int k = 0; k < nodes; ++k) {
        const double v = t[static_cast<std::size_t>(k)];
        terms.push_back(lw[static_cast<std::size_t>(k)] + std::log(prior.lambda / 2.0) -
                        prior.lambda * std::abs(v) + loglik({{S[0], v}}));
      }
      log_integral = logsumexp_acc(terms);
    } else if (s == 2) {
      std::vector<double> terms;
      for (int k1 = 0; k1 < nodes; ++k1)
        for (int k2 = 0; k2 < nodes; ++k2) {
          const double v1 = t[static_cast<std::size_t>(k1)];
          const double v2 = t[static_cast<std::size_t>(k2)];
          terms.push_back(lw[static_cast<std::size_t>(k1)] + lw[static_cast<std::size_t>(k2)] +
                          2.0 * std::log(prior.lambda / 2.0) -
                          prior.lambda * (std::abs(v1) + std::abs(v2)) +
                          loglik({{S[0], v1}, {S[1], v2}}));
        }
      log_integral = logsumexp_acc(terms);
    } else {
      continue;  // oracle fixture is p <= 2
    }
    logw[S] = log_pi_p(s, p, prior) - log_binom + log_integral;
  }
  std::vector<double> all;
  for (const auto& [S, v] : logw) all.push_back(v);
  const double m = *std::max_element(all.begin(), all.end());
  double total = 0.0;
  for (double v : all) total += std::exp(v - m);
  semibayes::ModelWeightTable table;
  for (const auto& [S, v] : logw) table.entries[S] = std::exp(v - m) / total;
  table.source = "mcmc";
  return table;
}

// Random-search upper bound for the compatibility objective: min over
// random sparse theta of s_theta * theta' Sigma theta / |theta|_1^2.
inline double compat_random_search(const Eigen::MatrixXd& Sigma, int s, int draws,
                                   std::uint64_t seed) {
  semibayes::Rng rng(seed);
  const int p = static_cast<int>(Sigma.rows());
  double best = std::numeric_limits<double>::infinity();
  for (int d = 0; d < draws; ++d) {
    const int m = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(s)));
    std::vector<int> idx(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j;
    for (int k = 0; k < m; ++k) {
      const std::size_t pick =
          static_cast<std::size_t>(k) + rng.uniform_index(static_cast<std::size_t>(p - k));
      std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    double l1 = 0.0;
    for (int k = 0; k < m; ++k) {
      double v = rng.exponential(1.0);
      if (rng.uniform() < 0.5) v = -v;
      theta[idx[static_cast<std::size_t>(k)]] = v;
      l1 += std::abs(v);
    }
    theta /= l1;
    const double value = m * theta.dot(Sigma * theta);
    best = std::min(best, value);
  }
  return best;
}

// Kolmogorov-Smirnov machinery. The asymptotic p-value follows the standard
// series 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double ks_pvalue_from_lambda(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double s = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * s));
}

struct KsResult {
  double d = 0.0;
  double pvalue = 1.0;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t na = a.size(), nb = b.size();
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < na && j < nb) {
    const double x = std::min(a[i], b[j]);
    while (i < na && a[i] <= x) ++i;
    while (j < nb && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = static_cast<double>(na) * nb / (na + nb);
  const double sq = std::sqrt(ne);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  return {d, ks_pvalue_from_lambda(lambda)};
}

inline KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(a[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  const double sq = std::sqrt(static_cast<double>(n));
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  return {d, ks_pvalue_from_lambda(lambda)};
}

// Grid-integration oracle for the 1-D posterior theta | y* under a unit
// information Gaussian likelihood and Laplace(lambda) prior; returns the cdf.
inline std::function<double(double)> laplace_posterior_cdf(double ystar, double lambda,
                                                           double range = 20.0,
                                                           int nodes = 20000) {
  auto grid = std::make_shared<std::vector<std::pair<double, double>>>();
  const double h = 2.0 * range / nodes;
  double total = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double x = -range + (k + 0.5) * h;
    const double w = std::exp(-0.5 * (ystar - x) * (ystar - x) - lambda * std::abs(x));
    total += w * h;
    grid->push_back({x, w * h});
  }
  double acc = 0.0;
  for (auto& [x, w] : *grid) {
    acc += w;
    w = acc / total;  // cumulative
  }
  return [grid](double x) {
    if (grid->empty() || x < grid->front().first) return 0.0;
    auto it = std::upper_bound(grid->begin(), grid->end(), x,
                               [](double v, const auto& e) { return v < e.first; });
    if (it == grid->begin()) return 0.0;
    return (it - 1)->second;
  };
}

}  // namespace oracles
