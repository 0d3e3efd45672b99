#pragma once

#include "wplap/linalg.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>
#include <vector>

namespace testing_support {

/// Q diag(lambda) Q^T with log-uniform eigenvalues in [1, cond] times a random scale.
inline wplap::Mat random_spd(std::mt19937_64& rng, int n, double cond) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = g(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ();
  const double scale = std::exp(2.0 * u(rng) - 1.0);
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) lam(i) = scale * std::pow(cond, u(rng));
  lam(0) = scale;
  lam(n - 1) = scale * cond;
  const Eigen::MatrixXd m = q * lam.asDiagonal() * q.transpose();
  wplap::Mat out = 0.5 * (m + m.transpose());
  return out;
}

inline std::vector<std::vector<double>> to_rows(const wplap::Mat& m) {
  std::vector<std::vector<double>> r(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_support
