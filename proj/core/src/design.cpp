#include "semibayes/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "semibayes/common.hpp"
#include "semibayes/divergences.hpp"
#include "semibayes/rng.hpp"

namespace semibayes {

GramSummary GramSummary::from_design(const Eigen::MatrixXd& X) {
  GramSummary g;
  g.n = static_cast<int>(X.rows());
  g.p = static_cast<int>(X.cols());
  g.Sigma = (X.transpose() * X) / static_cast<double>(g.n);
  g.Sigma = 0.5 * (g.Sigma + g.Sigma.transpose()).eval();  // exact symmetry
  g.validate();
  return g;
}

GramSummary GramSummary::from_matrix(Eigen::MatrixXd Sigma, int n) {
  GramSummary g;
  g.n = n;
  g.p = static_cast<int>(Sigma.rows());
  g.Sigma = std::move(Sigma);
  g.validate();
  return g;
}

void GramSummary::validate() const {
  if (Sigma.rows() != Sigma.cols() || Sigma.rows() != p)
    throw invalid_input("gram: Sigma must be p x p");
  if (n < 1 || p < 1) throw invalid_input("gram: need n >= 1, p >= 1");
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw invalid_input("gram: Sigma not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw invalid_input("gram: Sigma not positive semidefinite");
}

namespace {

// Iterates combinations {0..p-1} choose m in lexicographic order.
bool next_combination(std::vector<int>& idx, int p) {
  const int m = static_cast<int>(idx.size());
  int i = m - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == p - m + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < m; ++j)
    idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

double binom_double(int p, int m) {
  double v = 1.0;
  for (int i = 1; i <= m; ++i) v *= static_cast<double>(p - m + i) / i;
  return v;
}

double compat_ops_estimate(int p, int s) {
  double ops = 0.0;
  for (int m = 1; m <= s; ++m)
    ops += binom_double(p, m) * std::ldexp(1.0, std::max(0, m - 1)) * m * m * m;
  return ops;
}

double re_ops_estimate(int p, int s) {
  return binom_double(p, s) * static_cast<double>(s) * s * s;
}

// Minimum over the signed simplex of |T| * theta' A theta, theta supported
// exactly on T with sum |theta| = 1, for one sign pattern baked into A.
// Interior KKT: A w = ones, all w > 0, value = |T| quad / (sum w)^2.
double interior_candidate(const Eigen::MatrixXd& A) {
  const int m = static_cast<int>(A.rows());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd w = ldlt.solve(ones);
  if (!w.allFinite()) return std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    if (w[i] <= 0.0) return std::numeric_limits<double>::infinity();
  const double sumw = w.sum();
  if (!(sumw > 0.0)) return std::numeric_limits<double>::infinity();
  const double quad = w.dot(A * w);
  return (static_cast<double>(m) * quad) / (sumw * sumw);
}

bool is_diagonal(const Eigen::MatrixXd& A) {
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (i != j && A(i, j) != 0.0) return false;
  return true;
}

double min_eigenvalue(const Eigen::MatrixXd& A) {
  if (is_diagonal(A)) return A.diagonal().minCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const int m = static_cast<int>(v.size());
  std::vector<double> mu(v.data(), v.data() + m);
  std::sort(mu.begin(), mu.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int j = 0; j < m; ++j) {
    css += mu[static_cast<std::size_t>(j)];
    const double t = (css - 1.0) / (j + 1);
    if (mu[static_cast<std::size_t>(j)] - t > 0.0) {
      rho = j + 1;
      theta = t;
    }
  }
  Eigen::VectorXd out(m);
  for (int i = 0; i < m; ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

}  // namespace

double compatibility_number(const GramSummary& gram, int s, const CertBudget& budget) {
  if (s < 1 || s > gram.p) throw invalid_input("compatibility_number: need 1 <= s <= p");
  if (s > budget.s_max)
    throw budget_exceeded("compatibility_number: s=" + std::to_string(s) +
                          " exceeds exact budget s_max=" + std::to_string(budget.s_max) +
                          "; use the randomized upper-bound mode");
  if (compat_ops_estimate(gram.p, s) > budget.max_ops)
    throw budget_exceeded(
        "compatibility_number: support enumeration exceeds the operation budget; use the "
        "randomized upper-bound mode");

  double best = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= s; ++m) {
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    Eigen::MatrixXd sub(m, m), A(m, m);
    do {
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          sub(a, b) = gram.Sigma(idx[static_cast<std::size_t>(a)],
                                 idx[static_cast<std::size_t>(b)]);
      if (m == 1) {
        best = std::min(best, sub(0, 0));
        continue;
      }
      const std::uint64_t patterns = 1ULL << (m - 1);
      for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        for (int a = 0; a < m; ++a) {
          const double sa = (a > 0 && (mask >> (a - 1)) & 1) ? -1.0 : 1.0;
          for (int b = 0; b < m; ++b) {
            const double sb = (b > 0 && (mask >> (b - 1)) & 1) ? -1.0 : 1.0;
            A(a, b) = sa * sb * sub(a, b);
          }
        }
        best = std::min(best, interior_candidate(A));
      }
    } while (next_combination(idx, gram.p));
  }
  return std::sqrt(std::max(best, 0.0));
}

double restricted_eigenvalue(const GramSummary& gram, int s, const CertBudget& budget) {
  if (s < 1 || s > gram.p) throw invalid_input("restricted_eigenvalue: need 1 <= s <= p");
  if (s > budget.s_max)
    throw budget_exceeded("restricted_eigenvalue: s=" + std::to_string(s) +
                          " exceeds exact budget s_max=" + std::to_string(budget.s_max) +
                          "; use the randomized upper-bound mode");
  if (re_ops_estimate(gram.p, s) > budget.max_ops)
    throw budget_exceeded(
        "restricted_eigenvalue: subset enumeration exceeds the operation budget; use the "
        "randomized upper-bound mode");

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(s));
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::MatrixXd sub(s, s);
  do {
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b)
        sub(a, b) =
            gram.Sigma(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    best = std::min(best, min_eigenvalue(sub));
  } while (next_combination(idx, gram.p));
  return std::sqrt(std::max(best, 0.0));
}

double compatibility_number_randomized(const GramSummary& gram, int s, int restarts,
                                       std::uint64_t seed) {
  if (s < 1 || s > gram.p) throw invalid_input("compatibility_number: need 1 <= s <= p");
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < gram.p; ++j) best = std::min(best, gram.Sigma(j, j));
  for (int r = 0; r < restarts; ++r) {
    const int m = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(s)));
    // Random support without replacement.
    std::vector<int> idx(static_cast<std::size_t>(gram.p));
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < m; ++k) {
      const std::size_t pick =
          static_cast<std::size_t>(k) + rng.uniform_index(static_cast<std::size_t>(gram.p - k));
      std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
    }
    Eigen::MatrixXd A(m, m);
    std::vector<double> sign(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) sign[static_cast<std::size_t>(a)] = rng.uniform() < 0.5 ? -1 : 1;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        A(a, b) = sign[static_cast<std::size_t>(a)] * sign[static_cast<std::size_t>(b)] *
                  gram.Sigma(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    // Dirichlet(1) start, projected gradient on the simplex.
    Eigen::VectorXd u(m);
    for (int a = 0; a < m; ++a) u[a] = rng.exponential(1.0);
    u /= u.sum();
    const double lip = 2.0 * A.cwiseAbs().rowwise().sum().maxCoeff();
    const double step = lip > 0.0 ? 1.0 / lip : 1.0;
    for (int it = 0; it < 200; ++it) u = project_simplex(u - step * 2.0 * (A * u));
    best = std::min(best, static_cast<double>(m) * u.dot(A * u));
  }
  return std::sqrt(std::max(best, 0.0));
}

double restricted_eigenvalue_randomized(const GramSummary& gram, int s, int draws,
                                        std::uint64_t seed) {
  if (s < 1 || s > gram.p) throw invalid_input("restricted_eigenvalue: need 1 <= s <= p");
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd sub(s, s);
  for (int r = 0; r < draws; ++r) {
    std::vector<int> idx(static_cast<std::size_t>(gram.p));
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < s; ++k) {
      const std::size_t pick =
          static_cast<std::size_t>(k) + rng.uniform_index(static_cast<std::size_t>(gram.p - k));
      std::swap(idx[static_cast<std::size_t>(k)], idx[pick]);
    }
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b)
        sub(a, b) =
            gram.Sigma(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    best = std::min(best, min_eigenvalue(sub));
  }
  return std::sqrt(std::max(best, 0.0));
}

std::vector<DesignTableRow> design_table(const GramSummary& gram, int s_max,
                                         bool allow_randomized, const CertBudget& budget,
                                         std::uint64_t seed) {
  std::vector<DesignTableRow> rows;
  for (int s = 1; s <= std::min(s_max, gram.p); ++s) {
    DesignTableRow row;
    row.s = s;
    try {
      row.phi = compatibility_number(gram, s, budget);
      row.psi = restricted_eigenvalue(gram, s, budget);
      row.exact = true;
    } catch (const budget_exceeded&) {
      if (!allow_randomized) throw;
      row.phi = compatibility_number_randomized(gram, s, 2000, mix_seed(seed, s, 0));
      row.psi = restricted_eigenvalue_randomized(gram, s, 2000, mix_seed(seed, s, 1));
      row.exact = false;
    }
    rows.push_back(row);
  }
  return rows;
}

double score_oddness_residual(const SymmetricNormalMixture& eta,
                              const SymmetricNormalMixture& eta0, const QuadratureGrid& grid) {
  return std::abs(
      grid.integrate([&](double y) { return eta.ell_dot(y) * eta0.pdf(y); }));
}

namespace {

void require_truth(const Dataset& data, const char* who) {
  if (!data.truth) throw invalid_input(std::string(who) + ": dataset truth required");
}

void check_oddness(const SymmetricNormalMixture& eta, const SymmetricNormalMixture& eta0,
                   const QuadratureGrid& grid, const char* who) {
  const double r = score_oddness_residual(eta, eta0, grid);
  if (r > 1e-8)
    throw numeric_error(std::string(who) + ": score centering term " + std::to_string(r) +
                        " is not numerically zero");
}

void check_support_indices(const std::vector<int>& S, int p, const char* who) {
  int prev = -1;
  for (int j : S) {
    if (j <= prev || j < 0 || j >= p)
      throw invalid_input(std::string(who) + ": support must be sorted, unique, within [0,p)");
    prev = j;
  }
}

}  // namespace

Eigen::VectorXd efficient_score(const Dataset& data, const SymmetricNormalMixture& eta,
                                const std::vector<int>& S, const QuadratureGrid& grid) {
  require_truth(data, "efficient_score");
  check_support_indices(S, data.p(), "efficient_score");
  check_oddness(eta, data.truth->eta0, grid, "efficient_score");
  const Eigen::VectorXd eps = data.residuals(data.truth->theta0);
  Eigen::VectorXd G = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S.size()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(data.n()));
  for (int i = 0; i < data.n(); ++i) {
    const double score = eta.ell_dot(eps[i]);
    for (std::size_t c = 0; c < S.size(); ++c)
      G[static_cast<Eigen::Index>(c)] += score * data.X(i, S[c]);
  }
  return scale * G;
}

Eigen::MatrixXd info_matrix(const GramSummary& gram, double v, const std::vector<int>& S) {
  check_support_indices(S, gram.p, "info_matrix");
  const int m = static_cast<int>(S.size());
  Eigen::MatrixXd V(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      V(a, b) = v * gram.Sigma(S[static_cast<std::size_t>(a)], S[static_cast<std::size_t>(b)]);
  return V;
}

ModelWeightTable hat_w(const Dataset& data, const PriorConfig& prior,
                       const SymmetricNormalMixture& eta0,
                       const std::vector<std::vector<int>>& collection,
                       const QuadratureGrid& grid) {
  require_truth(data, "hat_w");
  if (collection.empty()) throw invalid_input("hat_w: empty support collection");
  const double v0 = v_eta(eta0, eta0, grid);
  const Eigen::VectorXd eps = data.residuals(data.truth->theta0);
  Eigen::VectorXd Ldot(data.n());
  for (int i = 0; i < data.n(); ++i) Ldot[i] = eta0.ell_dot(eps[i]);

  const int p = data.p();
  std::vector<double> logw(collection.size());
  for (std::size_t c = 0; c < collection.size(); ++c) {
    const auto& S = collection[c];
    check_support_indices(S, p, "hat_w");
    const int m = static_cast<int>(S.size());
    const double log_binom =
        std::lgamma(p + 1.0) - std::lgamma(m + 1.0) - std::lgamma(p - m + 1.0);
    double lw = log_pi_p(m, p, prior) - log_binom + m * std::log(prior.lambda / 2.0) +
                0.5 * m * (std::log(2.0 * M_PI) - std::log(v0));
    if (m > 0) {
      Eigen::MatrixXd Xs(data.n(), m);
      for (int a = 0; a < m; ++a) Xs.col(a) = data.X.col(S[static_cast<std::size_t>(a)]);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
      if (qr.rank() < m)
        throw numeric_error("hat_w: singular X_S'X_S for support " + support_to_string(S));
      double logdet = 0.0;
      for (int a = 0; a < m; ++a)
        logdet += std::log(std::abs(qr.matrixR()(a, a)));
      lw -= logdet;  // -1/2 log|X_S'X_S| = -sum log|R_aa|
      const Eigen::VectorXd qtl = (qr.householderQ().transpose() * Ldot).head(m);
      lw += qtl.squaredNorm() / (2.0 * v0);
    }
    logw[c] = lw;
  }
  const double m = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double lw : logw) total += std::exp(lw - m);
  ModelWeightTable table;
  table.source = "what-hat";
  for (std::size_t c = 0; c < collection.size(); ++c)
    table.entries[collection[c]] = std::exp(logw[c] - m) / total;
  return table;
}

double lan_remainder(const SparseVector& theta, const SymmetricNormalMixture& eta,
                     const Dataset& data, const QuadratureGrid& grid) {
  require_truth(data, "lan_remainder");
  if (theta.dim() != data.p()) throw invalid_input("lan_remainder: theta dim != p");
  const auto& truth = *data.truth;
  check_oddness(eta, truth.eta0, grid, "lan_remainder");
  const Eigen::VectorXd eps = data.residuals(truth.theta0);
  const Eigen::VectorXd r_theta = data.residuals(theta);
  double l_theta = 0.0, l_theta0 = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    l_theta += eta.ell(r_theta[i]);
    l_theta0 += eta.ell(eps[i]);
  }
  // X (theta - theta0) = eps - r_theta.
  const Eigen::VectorXd xdelta = eps - r_theta;
  double linear = 0.0;
  for (int i = 0; i < data.n(); ++i) linear += eta.ell_dot(eps[i]) * xdelta[i];
  const double v = v_eta(eta, truth.eta0, grid);
  return l_theta - l_theta0 - linear + 0.5 * v * xdelta.squaredNorm();
}

std::vector<BvmComponent> bvm_approximant(const Dataset& data, const ModelWeightTable& weights,
                                          const SymmetricNormalMixture& eta0,
                                          const QuadratureGrid& grid) {
  require_truth(data, "bvm_approximant");
  const double v0 = v_eta(eta0, eta0, grid);
  std::vector<BvmComponent> out;
  for (const auto& [S, w] : weights.entries) {
    BvmComponent comp;
    comp.S = S;
    comp.weight = w;
    const int m = static_cast<int>(S.size());
    if (m > 0) {
      Eigen::MatrixXd V(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          double dot = 0.0;
          for (int i = 0; i < data.n(); ++i)
            dot += data.X(i, S[static_cast<std::size_t>(a)]) *
                   data.X(i, S[static_cast<std::size_t>(b)]);
          V(a, b) = v0 * dot / data.n();
        }
      const Eigen::VectorXd G = efficient_score(data, eta0, S, grid);
      Eigen::LLT<Eigen::MatrixXd> llt(V);
      if (llt.info() != Eigen::Success)
        throw numeric_error("bvm_approximant: singular V_{n,S} for support " +
                            support_to_string(S));
      comp.center = llt.solve(G);
      comp.precision = std::move(V);
    }
    out.push_back(std::move(comp));
  }
  return out;
}

std::string BvmReport::to_json_string() const {
  nlohmann::json j;
  j["surrogate_tv"] = surrogate_tv;
  j["weight_tv"] = weight_tv;
  j["per_model"] = nlohmann::json::array();
  for (const auto& m : per_model)
    j["per_model"].push_back(
        {{"S", m.S}, {"tv_S", m.tv}, {"draws", m.draws}, {"skipped", m.skipped}});
  return j.dump();
}

BvmReport tv_surrogate(const std::vector<Draw>& draws, const std::vector<BvmComponent>& approx,
                       const SparseVector& theta0, int n, int min_draws) {
  if (draws.empty()) throw invalid_input("tv_surrogate: empty chain");
  const ModelWeightTable mcmc = model_weights(draws);
  ModelWeightTable approx_w;
  approx_w.source = "what-hat";
  for (const auto& comp : approx) approx_w.entries[comp.S] = comp.weight;

  BvmReport report;
  report.weight_tv = tv_distance(mcmc, approx_w);

  const std::vector<double> theta0_dense = theta0.to_dense();
  const double sqrtn = std::sqrt(static_cast<double>(n));
  double shape_term = 0.0;
  for (const auto& [S, w] : mcmc.entries) {
    BvmModelDiag diag;
    diag.S = S;
    const BvmComponent* comp = nullptr;
    for (const auto& c : approx)
      if (c.S == S) {
        comp = &c;
        break;
      }
    // Empty support: the component is the point mass at zero on both sides.
    if (S.empty()) {
      diag.tv = 0.0;
      diag.draws = static_cast<long>(std::llround(w * draws.size()));
      if (comp == nullptr) {
        diag.skipped = true;
        diag.tv = 1.0;
        shape_term += w;
      }
      report.per_model.push_back(std::move(diag));
      continue;
    }
    // Within-model draws of h_S.
    std::vector<Eigen::VectorXd> hs;
    for (const auto& d : draws) {
      if (d.theta.support() != S) continue;
      Eigen::VectorXd h(static_cast<Eigen::Index>(S.size()));
      for (std::size_t c = 0; c < S.size(); ++c)
        h[static_cast<Eigen::Index>(c)] =
            sqrtn * (d.theta.values()[c] - theta0_dense[static_cast<std::size_t>(S[c])]);
      hs.push_back(std::move(h));
    }
    diag.draws = static_cast<long>(hs.size());
    if (comp == nullptr || diag.draws < min_draws) {
      diag.skipped = true;
      diag.tv = 1.0;
      shape_term += w;  // conservative: full discrepancy
      report.per_model.push_back(std::move(diag));
      continue;
    }
    const int k = static_cast<int>(S.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
    for (const auto& h : hs) mean += h;
    mean /= static_cast<double>(hs.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
    for (const auto& h : hs) {
      const Eigen::VectorXd d = h - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(hs.size());
    // KL(N(mean, cov) || N(center, V^{-1})) with precision V:
    // 0.5 [ tr(V cov) - log det(V cov) - k + delta' V delta ].
    Eigen::LLT<Eigen::MatrixXd> cov_llt(cov);
    if (cov_llt.info() != Eigen::Success) {
      cov.diagonal().array() += 1e-12 * (cov.trace() / k + 1.0);
      cov_llt.compute(cov);
    }
    double tv = 1.0;
    if (cov_llt.info() == Eigen::Success) {
      double logdet_cov = 0.0;
      for (int a = 0; a < k; ++a) logdet_cov += 2.0 * std::log(cov_llt.matrixL()(a, a));
      Eigen::LLT<Eigen::MatrixXd> v_llt(comp->precision);
      double logdet_v = 0.0;
      for (int a = 0; a < k; ++a) logdet_v += 2.0 * std::log(v_llt.matrixL()(a, a));
      const Eigen::VectorXd delta = comp->center - mean;
      const double kl = 0.5 * ((comp->precision * cov).trace() - (logdet_v + logdet_cov) - k +
                               delta.dot(comp->precision * delta));
      tv = std::min(1.0, std::sqrt(std::max(kl, 0.0) / 2.0));
    }
    diag.tv = tv;
    shape_term += w * tv;
    report.per_model.push_back(std::move(diag));
  }
  report.surrogate_tv = 2.0 * report.weight_tv + shape_term;
  return report;
}

double RateConstants::s_n(int n, int s0) const {
  const double logn = std::log(static_cast<double>(n));
  return 2.0 * K_dim * std::max(static_cast<double>(s0), logn * logn);
}

void RateConstants::validate() const {
  if (!(K_dim > 0 && K_Hel > 0 && K_theta > 0 && K_eta > 0 && K_sel > 0))
    throw invalid_input("rate constants must be positive");
}

bool beta_min_check(const SparseVector& theta0, double psi_s, const RateConstants& rc, int n,
                    int p, double s_n) {
  if (!(psi_s > 0.0)) throw invalid_input("beta_min_check: psi must be positive");
  const double threshold =
      rc.K_theta / psi_s * std::sqrt(s_n * std::log(static_cast<double>(p)) / n);
  return theta0.min_abs_value() > threshold;
}

}  // namespace semibayes
