#pragma once

#include <span>
#include <string>
#include <vector>

namespace joss {

/// Degree-2 multivariate polynomial: linear + quadratic + pairwise interaction
/// terms + intercept. Feature expansion order is fixed:
///   [x0..x{n-1}, x0^2..x{n-1}^2, x0x1, x0x2, x1x2, 1]
struct MprModel {
  int n_vars = 0;
  std::vector<double> coeffs;  // in expansion order, intercept last

  static int coeff_count(int n_vars) {
    return 2 * n_vars + n_vars * (n_vars - 1) / 2 + 1;
  }
  double predict(std::span<const double> x) const;
};

struct ProfileDataset {
  int n_vars = 0;
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  std::string provenance;  // which (cluster, n_cores) the rows came from

  void add(std::vector<double> x, double y);
  size_t rows() const { return ys.size(); }
};

/// Least-squares fit via column-pivoted QR. Throws std::invalid_argument
/// when under-determined and std::runtime_error naming the collinear
/// expanded columns on rank deficiency.
MprModel fit(const ProfileDataset& data);

/// Names of the expanded feature columns, e.g. "x0", "x1^2", "x0*x2", "1".
std::vector<std::string> feature_names(int n_vars);

/// Expand a raw x-vector into the fixed feature order.
std::vector<double> expand_features(std::span<const double> x);

}  // namespace joss
