#include "semibayes/sparse_vector.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "semibayes/common.hpp"

namespace semibayes {

SparseVector::SparseVector(int dim, std::vector<int> support, std::vector<double> values)
    : dim_(dim), support_(std::move(support)), values_(std::move(values)) {
  validate();
}

void SparseVector::validate() const {
  if (dim_ < 1) throw invalid_input("SparseVector: dim must be >= 1");
  if (support_.size() != values_.size())
    throw invalid_input("SparseVector: support/values length mismatch");
  int prev = -1;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const int j = support_[k];
    if (j <= prev) throw invalid_input("SparseVector: support not strictly increasing");
    if (j < 0 || j >= dim_)
      throw invalid_input("SparseVector: index " + std::to_string(j) + " outside [0," +
                          std::to_string(dim_) + ")");
    const double v = values_[k];
    if (v == 0.0 || !std::isfinite(v))
      throw invalid_input("SparseVector: stored values must be nonzero and finite");
    prev = j;
  }
}

double SparseVector::min_abs_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, std::abs(v));
  return m;
}

double SparseVector::l1_norm() const {
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return s;
}

double SparseVector::l2_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
  for (std::size_t k = 0; k < support_.size(); ++k)
    out[static_cast<std::size_t>(support_[k])] = values_[k];
  return out;
}

namespace {

template <class F>
void for_each_diff(const SparseVector& a, const SparseVector& b, F&& f) {
  if (a.dim() != b.dim()) throw invalid_input("SparseVector: dimension mismatch");
  std::size_t i = 0, j = 0;
  const auto& sa = a.support();
  const auto& sb = b.support();
  while (i < sa.size() || j < sb.size()) {
    if (j == sb.size() || (i < sa.size() && sa[i] < sb[j])) {
      f(a.values()[i]);
      ++i;
    } else if (i == sa.size() || sb[j] < sa[i]) {
      f(-b.values()[j]);
      ++j;
    } else {
      f(a.values()[i] - b.values()[j]);
      ++i;
      ++j;
    }
  }
}

}  // namespace

double SparseVector::l1_dist(const SparseVector& other) const {
  double s = 0.0;
  for_each_diff(*this, other, [&](double d) { s += std::abs(d); });
  return s;
}

double SparseVector::l2_dist(const SparseVector& other) const {
  double s = 0.0;
  for_each_diff(*this, other, [&](double d) { s += d * d; });
  return std::sqrt(s);
}

}  // namespace semibayes
