#pragma once

// Independent reference integrators used only by the tests.

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a, b] with Richardson correction.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                      int max_depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Adaptive Simpson on 16 equal pieces of [a, b].
inline double composite(const std::function<double(double)>& f, double a, double b, double tol) {
  constexpr int pieces = 16;
  double s = 0.0;
  const double w = (b - a) / pieces;
  for (int k = 0; k < pieces; ++k) s += simpson(f, a + k * w, a + (k + 1) * w, tol / pieces);
  return s;
}

}  // namespace oracle
