#pragma once

// Largest eigenvalue of a symmetric positive-definite matrix by plain power
// iteration with a Rayleigh quotient, on raw arrays (no Eigen).

#include <cmath>
#include <vector>

namespace oracle {

inline double power_iteration(const std::vector<std::vector<double>>& a, int max_iter = 200000) {
  const std::size_t n = a.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * static_cast<double>(i);
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) y[i] += a[i][j] * x[j];
      norm += y[i] * y[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) num += x[i] * a[i][j] * x[j];
    if (it > 10 && std::abs(num - lambda) <= 1e-16 * std::abs(num)) return num;
    lambda = num;
  }
  return lambda;
}

}  // namespace oracle
