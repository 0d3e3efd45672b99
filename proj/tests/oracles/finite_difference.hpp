#pragma once

#include <functional>

namespace oracle {

/// Five-point Laplacian of f at (x, y) with step h.
inline double laplacian5(const std::function<double(double, double)>& f, double x, double y, double h) {
  return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h);
}

/// Central difference gradient.
inline void gradient_cd(const std::function<double(double, double)>& f, double x, double y, double h, double& gx,
                        double& gy) {
  gx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
  gy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
}

}  // namespace oracle
