#include "wplap/error.hpp"
#include "wplap/orlicz.hpp"

#include "doctest.h"
#include "oracles/orlicz_sweep.hpp"
#include "oracles/quadrature.hpp"

#include <cmath>
#include <random>

using namespace wplap;
using namespace wplap::orlicz;

namespace {

VecN vec(double x, double y) {
  VecN v(2);
  v << x, y;
  return v;
}

std::vector<std::pair<VecN, VecN>> random_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI), lg(-3.0, 3.0);
  std::vector<std::pair<VecN, VecN>> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double rp = std::exp(lg(rng)), rq = std::exp(lg(rng));
    const double a = ang(rng), b = ang(rng);
    out.emplace_back(vec(rp * std::cos(a), rp * std::sin(a)), vec(rq * std::cos(b), rq * std::sin(b)));
  }
  return out;
}

// Envelopes of (A(P)-A(Q)).(P-Q) / |V(P)-V(Q)|^2 from the brute-force sweep
// in oracles/orlicz_sweep.hpp (grid over |Q|/|P| and angle, zoomed, plus
// the P -> Q limit).
constexpr double kEnvP4Lo = 0.74999999997505229, kEnvP4Hi = 1.1250000000000002;
constexpr double kEnvP15Lo = 0.88888888840611535, kEnvP15Hi = 1.0515668461264174;

}  // namespace

TEST_CASE("power N-function values") {
  CHECK(phi(2.0, 3.0) == doctest::Approx(4.5));
  CHECK(phi_prime(2.0, 3.0) == doctest::Approx(3.0));
  CHECK(phi_conjugate(2.0, 3.0) == doctest::Approx(4.5));
  CHECK(phi(4.0, 2.0) == doctest::Approx(4.0));
  CHECK(phi_conjugate(4.0, 2.0) == doctest::Approx(std::pow(2.0, 4.0 / 3.0) * 0.75).epsilon(1e-14));
  const PowerNFunction f(3.0);
  CHECK(f.conjugate() == doctest::Approx(1.5));
  try {
    phi(2.0, -1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS(PowerNFunction(1.0), Error);
  CHECK_THROWS_AS(phi_shifted(2.0, -1.0, 1.0), Error);
}

TEST_CASE("Young equality case") {
  for (double p : {1.1, 1.5, 2.0, 3.0, 7.0})
    for (double t : {1e-3, 0.4, 1.0, 2.5, 40.0}) {
      const double lhs = phi_conjugate(p, phi_prime(p, t)) + phi(p, t);
      CHECK(lhs == doctest::Approx(t * phi_prime(p, t)).epsilon(1e-12));
    }
}

TEST_CASE("shifted N-function closed form") {
  for (double a : {0.0, 0.3, 2.0})
    for (double t : {0.1, 1.0, 5.0}) CHECK(phi_shifted(2.0, a, t) == doctest::Approx(t * t / 2.0).epsilon(1e-14));
  CHECK(phi_shifted(3.0, 0.0, 2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(phi_shifted(3.0, 1.0, 2.0) == doctest::Approx(17.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("shifted N-function against its defining integral") {
  // phi_a(t) = int_0^t phi'(a v s) / (a v s) s ds
  for (double p : {1.5, 3.0, 4.0})
    for (double a : {0.5, 1.0, 2.0})
      for (double t : {0.25, 1.0, 2.0, 3.5}) {
        const auto integrand = [&](double s) {
          const double m = std::max(a, s);
          return std::pow(m, p - 1.0) / m * s;
        };
        const double ref = t <= a ? oracle::simpson(integrand, 0.0, t, 1e-14)
                                  : oracle::simpson(integrand, 0.0, a, 1e-14) + oracle::simpson(integrand, a, t, 1e-14);
        CHECK(std::abs(phi_shifted(p, a, t) - ref) <= 1e-10 * std::max(1.0, ref));
      }
}

TEST_CASE("shifted conjugate equals the Legendre transform") {
  for (double p : {1.5, 3.0})
    for (double a : {0.0, 0.5, 2.0})
      for (double s : {0.01, 0.7, 3.0, 20.0}) {
        const PowerNFunction f(p);
        const double ref = oracle::shifted_legendre(p, a, s);
        CHECK(f.shifted_conjugate(a, s) == doctest::Approx(ref).epsilon(1e-9));
      }
}

TEST_CASE("A and V maps") {
  const VecN xi = vec(0.3, -1.2);
  CHECK((a_map(2.0, xi) - xi).norm() <= 1e-15);
  CHECK((v_map(2.0, xi) - xi).norm() <= 1e-15);
  const VecN ones = vec(1.0, 1.0);
  CHECK((a_map(4.0, ones) - vec(2.0, 2.0)).norm() <= 1e-14);
  CHECK((v_map(4.0, ones) - vec(std::sqrt(2.0), std::sqrt(2.0))).norm() <= 1e-14);
  CHECK(a_map(1.5, vec(0.0, 0.0)).norm() == 0.0);
  CHECK(v_map(1.5, vec(0.0, 0.0)).norm() == 0.0);
  for (const auto& [p_, q_] : random_pairs(200, 1))
    for (double p : {1.3, 2.0, 4.5}) {
      const double lhs = a_map(p, p_).dot(p_);
      CHECK(lhs == doctest::Approx(v_map(p, p_).squaredNorm()).epsilon(1e-13));
    }
  Mat m(2, 2);
  m << 2.0, 0.5, 0.5, 1.0;
  const VecN w = a_map_weighted(3.0, m, xi);
  const VecN mx = m * xi;
  CHECK((w - mx.norm() * (m * m * xi)).norm() <= 1e-13);
}

TEST_CASE("equivalence ratios") {
  const auto pairs = random_pairs(100000, 2024);
  const auto r2 = equiv_ratios(2.0, pairs);
  CHECK(r2.monotone_vs_v.min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r2.monotone_vs_v.max == doctest::Approx(1.0).epsilon(1e-12));

  const auto r4 = equiv_ratios(4.0, pairs);
  CHECK(r4.monotone_vs_v.min >= kEnvP4Lo - 1e-9);
  CHECK(r4.monotone_vs_v.max <= kEnvP4Hi + 1e-9);
  const auto r15 = equiv_ratios(1.5, pairs);
  CHECK(r15.monotone_vs_v.min >= kEnvP15Lo - 1e-9);
  CHECK(r15.monotone_vs_v.max <= kEnvP15Hi + 1e-9);
  CHECK(r15.monotone_vs_shift.min > 0.0);
  CHECK(std::isfinite(r15.monotone_vs_shift.max));
  CHECK(r4.monotone_vs_v.count + r4.monotone_vs_v.skipped == pairs.size());
}

TEST_CASE("frozen envelopes match the oracle sweep") {
  const auto e4 = oracle::monotone_envelope(4.0);
  CHECK(e4.lo == doctest::Approx(kEnvP4Lo).epsilon(1e-12));
  CHECK(e4.hi == doctest::Approx(kEnvP4Hi).epsilon(1e-12));
  const auto e15 = oracle::monotone_envelope(1.5);
  CHECK(e15.lo == doctest::Approx(kEnvP15Lo).epsilon(1e-12));
  CHECK(e15.hi == doctest::Approx(kEnvP15Hi).epsilon(1e-12));
}

TEST_CASE("degenerate pairs are skipped") {
  std::vector<std::pair<VecN, VecN>> pairs{{vec(1, 1), vec(1, 1)}, {vec(1, 0), vec(0, 1)}};
  const auto r = equiv_ratios(3.0, pairs);
  CHECK(r.monotone_vs_v.count == 1);
  CHECK(r.monotone_vs_v.skipped == 1);
}

TEST_CASE("shifted functions are increasing, convex and Delta_2") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 6.0}) {
    const double d2 = std::pow(2.0, std::max(2.0, p));
    for (double a : {0.0, 0.01, 1.0, 30.0}) {
      CHECK(phi_shifted(p, a, 0.0) == 0.0);
      double prev = 0.0;
      for (int k = -60; k <= 60; ++k) {
        const double t = std::pow(10.0, k / 20.0);
        const double v = phi_shifted(p, a, t);
        CHECK(v > prev);
        prev = v;
        CHECK(phi_shifted(p, a, 2.0 * t) <= d2 * v * (1.0 + 1e-12));
        // Convexity: midpoint below the chord on a log-spaced triple.
        const double lo = t / 1.1, hi = t * 1.1;
        const double mid = 0.5 * (lo + hi);
        CHECK(phi_shifted(p, a, mid) <= 0.5 * (phi_shifted(p, a, lo) + phi_shifted(p, a, hi)) * (1.0 + 1e-12));
        const double eq = v / (std::pow(std::max(a, t), p - 2.0) * t * t);
        CHECK(eq >= std::min(0.5, 1.0 / p) * (1.0 - 1e-9));
        CHECK(eq <= std::max(0.5, 1.0 / p) * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("Young inequality with the swept constant") {
  // c(eps) from oracle::young_constant: eps^{1-p'} or 1/eps, whichever is larger.
  struct Row {
    double p, eps, c;
  };
  const Row rows[] = {{1.5, 0.1, 100.0000000000001}, {1.5, 1.0, 1.0}, {3.0, 0.1, 10.000000000000005}, {3.0, 1.0, 1.0}};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lg(-4.0, 4.0);
  for (const auto& row : rows) {
    CHECK(oracle::young_constant(row.p, row.eps) == doctest::Approx(row.c).epsilon(1e-12));
    const PowerNFunction f(row.p);
    int violations = 0;
    for (int k = 0; k < 20000; ++k) {
      const double s = std::exp(lg(rng)), t = std::exp(lg(rng));
      const double a = k % 5 == 0 ? 0.0 : std::exp(lg(rng));
      const double rhs = row.c * f.shifted_conjugate(a, s) + row.eps * f.shifted(a, t);
      if (s * t > rhs * (1.0 + 1e-12)) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("shift reports are finite diagnostics") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lg(-2.0, 2.0);
  std::vector<ShiftSample> shift;
  std::vector<RemovalSample> removal;
  for (int k = 0; k < 2000; ++k) {
    shift.push_back({vec(std::exp(lg(rng)), std::exp(lg(rng))), vec(std::exp(lg(rng)), -std::exp(lg(rng))),
                     std::exp(lg(rng))});
    removal.push_back({std::exp(lg(rng)), std::exp(lg(rng)), std::exp(lg(rng) - 2.0)});
  }
  for (double p : {1.5, 3.0}) {
    const auto c = change_of_shift_report(p, 0.5, shift);
    CHECK(std::isfinite(c.max));
    CHECK(c.count > 0);
    const auto r = removal_of_shift_report(p, removal);
    REQUIRE(r.size() == 3);
    for (const auto& s : r) CHECK(std::isfinite(s.max));
  }
  const std::string line = ratio_csv("r1", RatioStats{0.5, 2.0, 10, 1});
  CHECK(line.find("r1") == 0);
}
