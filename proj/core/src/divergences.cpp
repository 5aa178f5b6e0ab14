#include "semibayes/divergences.hpp"

#include <cmath>
#include <string>

#include "semibayes/common.hpp"

namespace semibayes {

namespace {

void check_tail_mass(const SymmetricNormalMixture& eta, const QuadratureGrid& grid,
                     const char* what) {
  const double tail = eta.tail_mass_outside(grid.lo, grid.hi);
  if (tail > 1e-10)
    throw invalid_input(std::string(what) + ": grid too narrow, tail mass " +
                        std::to_string(tail));
}

}  // namespace

double log_likelihood(const SparseVector& theta, const SymmetricNormalMixture& eta,
                      const Dataset& data) {
  if (theta.dim() != data.p()) throw invalid_input("log_likelihood: theta dim != p");
  const auto& support = theta.support();
  const auto& values = theta.values();
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    double dot = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k)
      dot += data.X(i, support[k]) * values[k];
    total += eta.ell(data.y[i] - dot);
  }
  return total;
}

std::pair<double, double> v_eta_routes(const SymmetricNormalMixture& eta,
                                       const SymmetricNormalMixture& eta0,
                                       const QuadratureGrid& grid) {
  check_tail_mass(eta0, grid, "v_eta");
  const double score_product = grid.integrate(
      [&](double y) { return eta.ell_dot(y) * eta0.ell_dot(y) * eta0.pdf(y); });
  const double neg_curvature =
      grid.integrate([&](double y) { return -eta.ell_ddot(y) * eta0.pdf(y); });
  return {score_product, neg_curvature};
}

double v_eta(const SymmetricNormalMixture& eta, const SymmetricNormalMixture& eta0,
             const QuadratureGrid& grid, double tol) {
  const auto [score_product, neg_curvature] = v_eta_routes(eta, eta0, grid);
  if (std::abs(score_product - neg_curvature) > tol)
    throw numeric_error("v_eta: score-product and curvature routes disagree: " +
                        std::to_string(score_product) + " vs " + std::to_string(neg_curvature));
  if (!(score_product > 0.0)) throw numeric_error("v_eta: nonpositive information");
  return score_product;
}

double hellinger_sq(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b,
                    const QuadratureGrid& grid) {
  check_tail_mass(a, grid, "hellinger");
  check_tail_mass(b, grid, "hellinger");
  const double v = grid.integrate([&](double y) {
    // 1e-300 floor before sqrt: denormals far in the tails.
    const double sa = std::sqrt(std::max(a.pdf(y), 1e-300));
    const double sb = std::sqrt(std::max(b.pdf(y), 1e-300));
    const double d = sa - sb;
    return d * d;
  });
  return std::max(v, 0.0);
}

double hellinger(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b,
                 const QuadratureGrid& grid) {
  return std::sqrt(hellinger_sq(a, b, grid));
}

double kl(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b,
          const QuadratureGrid& grid) {
  check_tail_mass(a, grid, "kl");
  check_tail_mass(b, grid, "kl");
  const double v =
      grid.integrate([&](double y) { return a.pdf(y) * (a.ell(y) - b.ell(y)); });
  return std::max(v, 0.0);
}

double hellinger(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b) {
  return hellinger(a, b, default_grid(a, b));
}

double kl(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b) {
  return kl(a, b, default_grid(a, b));
}

double mean_hellinger(const SparseVector& theta1, const SymmetricNormalMixture& eta1,
                      const SparseVector& theta2, const SymmetricNormalMixture& eta2,
                      const Dataset& data, int nodes_per_unit) {
  if (theta1.dim() != data.p() || theta2.dim() != data.p())
    throw invalid_input("mean_hellinger: theta dim != p");
  // d_H(eta1(.-a), eta2(.-b)) depends only on the relative shift b - a.
  Eigen::VectorXd shift1 = data.y - data.residuals(theta1);  // X theta1
  Eigen::VectorXd shift2 = data.y - data.residuals(theta2);
  double acc = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double delta = shift2[i] - shift1[i];
    const QuadratureGrid grid = default_grid(eta1, eta2, delta, nodes_per_unit);
    check_tail_mass(eta1, grid, "mean_hellinger");
    const double d2 = grid.integrate([&](double y) {
      const double sa = std::sqrt(std::max(eta1.pdf(y), 1e-300));
      const double sb = std::sqrt(std::max(eta2.pdf(y - delta), 1e-300));
      const double d = sa - sb;
      return d * d;
    });
    acc += std::max(d2, 0.0);
  }
  return std::sqrt(acc / data.n());
}

}  // namespace semibayes
