#include "semibayes/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "semibayes/common.hpp"
#include "semibayes/mixture.hpp"

namespace semibayes {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw invalid_input("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

QuadratureGrid make_grid(double lo, double hi, int nodes_per_unit) {
  if (!(lo < hi)) throw invalid_input("make_grid: need lo < hi");
  if (nodes_per_unit < 1) throw invalid_input("make_grid: nodes_per_unit must be >= 1");
  static std::vector<double> base_nodes, base_weights;
  static std::once_flag once;
  std::call_once(once, [] { gauss_legendre(16, base_nodes, base_weights); });

  const double length = hi - lo;
  const int panels = std::max(1, (int)std::ceil(length * nodes_per_unit / 16.0));
  QuadratureGrid g;
  g.lo = lo;
  g.hi = hi;
  g.nodes.reserve(static_cast<std::size_t>(panels) * 16);
  g.weights.reserve(static_cast<std::size_t>(panels) * 16);
  const double h = length / panels;
  for (int pidx = 0; pidx < panels; ++pidx) {
    const double a = lo + pidx * h;
    const double mid = a + 0.5 * h;
    for (int k = 0; k < 16; ++k) {
      g.nodes.push_back(mid + 0.5 * h * base_nodes[k]);
      g.weights.push_back(0.5 * h * base_weights[k]);
    }
  }
  return g;
}

QuadratureGrid default_grid(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b,
                            double shift, int nodes_per_unit) {
  const double ra = a.max_abs_location() + 8.0 * a.max_sigma();
  const double rb = b.max_abs_location() + 8.0 * b.max_sigma();
  const double r = std::max(ra, rb) + std::abs(shift);
  return make_grid(-r, r, nodes_per_unit);
}

QuadratureGrid default_grid(const SymmetricNormalMixture& a, int nodes_per_unit) {
  return default_grid(a, a, 0.0, nodes_per_unit);
}

}  // namespace semibayes
