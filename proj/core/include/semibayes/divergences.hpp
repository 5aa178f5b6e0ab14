#pragma once

#include "semibayes/dataset.hpp"
#include "semibayes/mixture.hpp"
#include "semibayes/quadrature.hpp"
#include "semibayes/sparse_vector.hpp"

namespace semibayes {

// sum_i ell(eta, y_i - x_i . theta), accumulated in ascending row order.
double log_likelihood(const SparseVector& theta, const SymmetricNormalMixture& eta,
                      const Dataset& data);

// The two defining routes of v_eta: the score product
// P_{eta0}(ell_dot_eta * ell_dot_eta0) and the negative curvature
// -P_{eta0}(ell_ddot_eta). They agree identically (integration by parts);
// the pair is exposed so the agreement itself can be asserted.
std::pair<double, double> v_eta_routes(const SymmetricNormalMixture& eta,
                                       const SymmetricNormalMixture& eta0,
                                       const QuadratureGrid& grid);

// v_eta cross-checked across both routes; throws numeric_error if they
// disagree beyond tol or the result is nonpositive (eta too far from eta0
// for the LAN quantities to be meaningful), invalid_input if eta0 has
// > 1e-10 mass outside the grid.
double v_eta(const SymmetricNormalMixture& eta, const SymmetricNormalMixture& eta0,
             const QuadratureGrid& grid, double tol = 1e-6);

double hellinger_sq(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b,
                    const QuadratureGrid& grid);
double hellinger(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b,
                 const QuadratureGrid& grid);
double kl(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b,
          const QuadratureGrid& grid);

// Convenience overloads on the default grid for the two mixtures.
double hellinger(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b);
double kl(const SymmetricNormalMixture& a, const SymmetricNormalMixture& b);

// d_n: sqrt of the average over rows of d_H^2 between the two shifted error
// densities; each pair integrated on a grid translated to cover both shifts.
double mean_hellinger(const SparseVector& theta1, const SymmetricNormalMixture& eta1,
                      const SparseVector& theta2, const SymmetricNormalMixture& eta2,
                      const Dataset& data, int nodes_per_unit = 64);

}  // namespace semibayes
