#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "semibayes/mixture.hpp"
#include "semibayes/sparse_vector.hpp"

namespace semibayes {

// Ground truth carried by simulated datasets; required by the diagnostics
// that are defined at (theta0, eta0).
struct Truth {
  SparseVector theta0;
  SymmetricNormalMixture eta0;
};

struct Dataset {
  Eigen::MatrixXd X;  // n x p design
  Eigen::VectorXd y;  // n responses
  std::optional<Truth> truth;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }

  double max_abs_entry() const { return X.cwiseAbs().maxCoeff(); }

  // Throws invalid_input if shapes disagree, entries are non-finite, or a
  // declared bound L is violated.
  void validate(std::optional<double> bound_L = std::nullopt) const;

  // Residuals y - X * theta (theta sparse).
  Eigen::VectorXd residuals(const SparseVector& theta) const;
};

// CSV with header; first column must be named y, remaining columns x1..xp.
Dataset read_csv(const std::string& path);
void write_csv(const Dataset& data, const std::string& path);

// Truth JSON: {"theta0":{"dim":..,"support":[..],"values":[..]},"eta0":{"atoms":[..]}}
Truth truth_from_json_string(const std::string& text);
std::string truth_to_json_string(const Truth& truth);

}  // namespace semibayes
