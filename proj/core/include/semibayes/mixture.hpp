#pragma once

#include <string>
#include <vector>

namespace semibayes {

class Rng;

struct MixtureAtom {
  double z = 0.0;      // location
  double sigma = 1.0;  // scale, > 0
  double w = 1.0;      // weight, > 0

  bool operator==(const MixtureAtom&) const = default;
};

// Symmetric finite mixture of normals: the error density eta. Closed under
// location negation: every atom with z != 0 has a mirror atom (-z, sigma, w)
// with identical sigma and weight, so pdf(x) == pdf(-x).
class SymmetricNormalMixture {
 public:
  explicit SymmetricNormalMixture(std::vector<MixtureAtom> atoms);

  static SymmetricNormalMixture standard_normal() {
    return SymmetricNormalMixture({{0.0, 1.0, 1.0}});
  }

  const std::vector<MixtureAtom>& atoms() const { return atoms_; }

  double pdf(double x) const;      // strictly positive for finite x
  double log_pdf(double x) const;  // ell(x), log-sum-exp stabilized
  double ell(double x) const { return log_pdf(x); }
  double ell_dot(double x) const;   // -d/dx log pdf
  double ell_ddot(double x) const;  // d^2/dx^2 log pdf
  double cdf(double x) const;

  // Mass outside [lo,hi]; the quadrature routines use this as a guard.
  double tail_mass_outside(double lo, double hi) const;

  double variance() const;  // mean is 0 by symmetry: sum w (z^2 + sigma^2)
  double max_abs_location() const;
  double max_sigma() const;

  // True iff every |z| <= M and sigma in [sigma1, sigma2] (base-measure box).
  bool within_box(double M, double sigma1, double sigma2) const;

  double sample(Rng& rng) const;

  std::string to_json_string() const;
  static SymmetricNormalMixture from_json_string(const std::string& text);

  bool operator==(const SymmetricNormalMixture& other) const = default;

 private:
  std::vector<MixtureAtom> atoms_;
};

}  // namespace semibayes
