#include "joss/mpr.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace joss {

std::vector<double> expand_features(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> f;
  f.reserve(MprModel::coeff_count(n));
  for (int i = 0; i < n; ++i) f.push_back(x[i]);
  for (int i = 0; i < n; ++i) f.push_back(x[i] * x[i]);
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) f.push_back(x[i] * x[k]);
  f.push_back(1.0);
  return f;
}

std::vector<std::string> feature_names(int n_vars) {
  std::vector<std::string> names;
  for (int i = 0; i < n_vars; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 0; i < n_vars; ++i) names.push_back("x" + std::to_string(i) + "^2");
  for (int i = 0; i < n_vars; ++i)
    for (int k = i + 1; k < n_vars; ++k)
      names.push_back("x" + std::to_string(i) + "*x" + std::to_string(k));
  names.push_back("1");
  return names;
}

double MprModel::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_vars)
    throw std::invalid_argument("mpr predict: arity mismatch, expected " +
                                std::to_string(n_vars) + " got " +
                                std::to_string(x.size()));
  auto f = expand_features(x);
  double y = 0.0;
  for (size_t i = 0; i < f.size(); ++i) y += coeffs[i] * f[i];
  return y;
}

void ProfileDataset::add(std::vector<double> x, double y) {
  if (xs.empty()) {
    n_vars = static_cast<int>(x.size());
  } else if (static_cast<int>(x.size()) != n_vars) {
    throw std::invalid_argument("profile dataset: mixed row arity");
  }
  xs.push_back(std::move(x));
  ys.push_back(y);
}

MprModel fit(const ProfileDataset& data) {
  const int n = data.n_vars;
  const int p = MprModel::coeff_count(n);
  const int m = static_cast<int>(data.rows());
  if (m < p)
    throw std::invalid_argument("mpr fit: " + std::to_string(m) + " rows for " +
                                std::to_string(p) + " coefficients");
  Eigen::MatrixXd A(m, p);
  Eigen::VectorXd b(m);
  for (int r = 0; r < m; ++r) {
    auto f = expand_features(data.xs[r]);
    for (int c = 0; c < p; ++c) A(r, c) = f[c];
    b(r) = data.ys[r];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    auto names = feature_names(n);
    const auto& perm = qr.colsPermutation().indices();
    std::string bad;
    for (int c = qr.rank(); c < p; ++c) {
      if (!bad.empty()) bad += ", ";
      bad += names[perm(c)];
    }
    throw std::runtime_error("mpr fit: design matrix rank deficient, collinear columns: " + bad);
  }
  Eigen::VectorXd beta = qr.solve(b);
  MprModel model;
  model.n_vars = n;
  model.coeffs.assign(beta.data(), beta.data() + p);
  for (double c : model.coeffs)
    if (!std::isfinite(c)) throw std::runtime_error("mpr fit: non-finite coefficient");
  return model;
}

}  // namespace joss
