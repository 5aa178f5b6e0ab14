#pragma once

#include <cstdint>
#include <vector>

namespace semibayes {

// Coefficient vector theta stored as (ambient dim, sorted support, nonzero
// values). Invariants are checked at construction: indices strictly
// increasing inside [0, dim), values nonzero and finite.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(int dim) : dim_(dim) { validate(); }
  SparseVector(int dim, std::vector<int> support, std::vector<double> values);

  int dim() const { return dim_; }
  int nnz() const { return static_cast<int>(support_.size()); }
  const std::vector<int>& support() const { return support_; }
  const std::vector<double>& values() const { return values_; }

  // Minimum |value| over the support; +inf for the zero vector.
  double min_abs_value() const;

  double l1_norm() const;
  double l2_norm() const;

  std::vector<double> to_dense() const;

  // l1/l2 distances to another vector with the same ambient dim.
  double l1_dist(const SparseVector& other) const;
  double l2_dist(const SparseVector& other) const;

  bool operator==(const SparseVector& other) const = default;

 private:
  void validate() const;

  int dim_ = 0;
  std::vector<int> support_;
  std::vector<double> values_;
};

}  // namespace semibayes
