#pragma once

// Brute-force envelopes for the Orlicz identities, computed from first
// principles (own A, V and shifted functions, numeric Legendre transform).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

namespace oracle {

struct Envelope {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

/// (A(P)-A(Q)).(P-Q) / |V(P)-V(Q)|^2 with |P| = 1 along e1 and
/// Q = rho (cos th, sin th).
inline double monotone_ratio(double p, double rho, double th) {
  const double px = 1.0, py = 0.0;
  const double qx = rho * std::cos(th), qy = rho * std::sin(th);
  const double aq = rho > 0.0 ? std::pow(rho, p - 2.0) : 0.0;
  const double vq = rho > 0.0 ? std::pow(rho, 0.5 * (p - 2.0)) : 0.0;
  const double num = (px - aq * qx) * (px - qx) + (py - aq * qy) * (py - qy);
  const double dvx = px - vq * qx, dvy = py - vq * qy;
  return num / (dvx * dvx + dvy * dvy);
}

/// Limit of monotone_ratio as Q -> P along the direction at angle phi:
/// quadratic forms of the Jacobians at P = e1, taken by central differences.
inline double monotone_limit(double p, double phi) {
  const double hx = std::cos(phi), hy = std::sin(phi);
  const auto a = [p](double x, double y, double& ox, double& oy) {
    const double n = std::pow(std::hypot(x, y), p - 2.0);
    ox = n * x;
    oy = n * y;
  };
  const auto v = [p](double x, double y, double& ox, double& oy) {
    const double n = std::pow(std::hypot(x, y), 0.5 * (p - 2.0));
    ox = n * x;
    oy = n * y;
  };
  const double d = 1e-5;
  double a1x, a1y, a2x, a2y, v1x, v1y, v2x, v2y;
  a(1.0 + d * hx, d * hy, a1x, a1y);
  a(1.0 - d * hx, -d * hy, a2x, a2y);
  v(1.0 + d * hx, d * hy, v1x, v1y);
  v(1.0 - d * hx, -d * hy, v2x, v2y);
  const double num = ((a1x - a2x) * hx + (a1y - a2y) * hy) / (2.0 * d);
  const double dvx = (v1x - v2x) / (2.0 * d), dvy = (v1y - v2y) / (2.0 * d);
  return num / (dvx * dvx + dvy * dvy);
}

/// Envelope of monotone_ratio over all pairs: by homogeneity and symmetry
/// |Q| <= |P| = 1 and th in [0, pi] suffice. Coarse grid, then zoomed grids
/// around both extremes, plus the diagonal limit P -> Q.
inline Envelope monotone_envelope(double p, int n = 400) {
  Envelope env;
  const auto valid = [](double rho, double th) {
    return std::hypot(1.0 - rho * std::cos(th), rho * std::sin(th)) >= 1e-6;
  };
  double best_lo[2] = {0.0, 0.0}, best_hi[2] = {0.0, 0.0};
  double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
  const auto visit = [&](double rho, double th) {
    if (!valid(rho, th)) return;
    const double r = monotone_ratio(p, rho, th);
    env.add(r);
    if (r < vlo) vlo = r, best_lo[0] = rho, best_lo[1] = th;
    if (r > vhi) vhi = r, best_hi[0] = rho, best_hi[1] = th;
  };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) visit(static_cast<double>(i) / n, std::numbers::pi * j / n);
  for (double* c : {best_lo, best_hi}) {
    double w = 2.0 / n;
    for (int level = 0; level < 8; ++level) {
      const double c0 = c[0], c1 = c[1];
      for (int i = -20; i <= 20; ++i)
        for (int j = -20; j <= 20; ++j)
          visit(std::clamp(c0 + w * i / 20.0, 0.0, 1.0),
                std::clamp(c1 + std::numbers::pi * w * j / 20.0, 0.0, std::numbers::pi));
      w /= 5.0;
    }
  }
  for (int k = 0; k <= 2000; ++k) env.add(monotone_limit(p, std::numbers::pi * k / 2000.0));
  return env;
}

/// Closed form of the shifted function of t^p / p.
inline double shifted(double p, double a, double t) {
  if (a == 0.0) return std::pow(t, p) / p;
  if (t <= a) return std::pow(a, p - 2.0) * t * t / 2.0;
  return std::pow(a, p) / 2.0 + (std::pow(t, p) - std::pow(a, p)) / p;
}

/// sup_t (s t - phi_a(t)) by bisection on the derivative phi_a'(t) = s.
inline double shifted_legendre(double p, double a, double s) {
  const auto deriv = [&](double t) {
    const double m = std::max(a, t);
    return m > 0.0 ? std::pow(m, p - 2.0) * t : 0.0;
  };
  double lo = 0.0, hi = 1.0;
  while (deriv(hi) < s) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (deriv(mid) < s ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return s * t - shifted(p, a, t);
}

/// Best constant c(eps) in s t <= c (phi_a)^*(s) + eps phi_a(t). Maximizing
/// over t first leaves sup_s eps (phi_a)^*(s / eps) / (phi_a)^*(s); by
/// homogeneity a in {0, 1} suffices. Log grid in s, then zoom.
inline double young_constant(double p, double eps) {
  double best = 0.0;
  for (double a : {0.0, 1.0}) {
    const auto ratio = [&](double ls) {
      const double s = std::exp(ls);
      return eps * shifted_legendre(p, a, s / eps) / shifted_legendre(p, a, s);
    };
    double arg = 0.0, val = -1.0;
    for (int k = 0; k <= 2000; ++k) {
      const double ls = -20.0 + 40.0 * k / 2000.0;
      const double r = ratio(ls);
      if (r > val) val = r, arg = ls;
    }
    double w = 0.02;
    for (int level = 0; level < 6; ++level) {
      const double c = arg;
      for (int k = -50; k <= 50; ++k) {
        const double r = ratio(c + w * k / 50.0);
        if (r > val) val = r, arg = c + w * k / 50.0;
      }
      w /= 10.0;
    }
    best = std::max(best, val);
  }
  return best;
}

}  // namespace oracle
