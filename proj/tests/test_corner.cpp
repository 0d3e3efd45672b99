#include "wplap/corner.hpp"
#include "wplap/error.hpp"

#include "doctest.h"
#include "oracles/finite_difference.hpp"
#include "oracles/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace wplap;

namespace {

constexpr double pi = std::numbers::pi;

// Closed form of the integral of |grad u|^q over r0 < r < r1: the gradient
// norm alpha r^{alpha-1} does not depend on the angle.
double closed_form_integral(double eps, double q, double r0, double r1) {
  const double th = std::atan(eps);
  const double alpha = (pi / 2) / (pi / 2 + th);
  const double beta = (alpha - 1.0) * q + 2.0;
  const double radial = std::abs(beta) < 1e-14 ? std::log(r1 / r0) : (std::pow(r1, beta) - std::pow(r0, beta)) / beta;
  return (pi + 2 * th) * std::pow(alpha, q) * radial;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("corner exponents") {
  CHECK(corner_exact(1.0).alpha() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(corner_exact(1.0).critical_q() == doctest::Approx(6.0).epsilon(1e-15));
  const double e8 = std::tan(pi / 8);
  CHECK(corner_exact(e8).alpha() == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(corner_exact(e8).critical_q() == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(corner_exact(e8).ray_angle() == doctest::Approx(pi / 8).epsilon(1e-15));
  for (double bad : {0.0, -0.5, 1.0 + 1e-9, 3.0, std::nan("")}) {
    try {
      corner_exact(bad);
      FAIL("expected domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
  }
}

TEST_CASE("flat limit is the linear function") {
  const auto u = corner_exact(1e-12);
  CHECK(u.alpha() == doctest::Approx(1.0).epsilon(1e-11));
  for (const Vec2& x : {Vec2(0.3, 0.4), Vec2(-0.7, 0.1), Vec2(0.05, 0.9), Vec2(-0.2, 0.0)}) {
    CHECK(std::abs(u.value(x) - x.y()) <= 1e-10);
    CHECK((u.gradient(x) - Vec2(0, 1)).norm() <= 1e-10);
  }
}

TEST_CASE("corner solution vanishes on both rays") {
  for (double eps : {0.05, 0.3, 1.0}) {
    const auto u = corner_exact(eps);
    for (double t : {1e-6, 0.01, 0.5, 0.999}) {
      CHECK(std::abs(u.value(Vec2(t, -eps * t))) <= 1e-12);
      CHECK(std::abs(u.value(Vec2(-t, -eps * t))) <= 1e-12);
    }
    CHECK(u.value(Vec2::Zero()) == 0.0);
    CHECK(u.value(Vec2(0, 0.5)) == doctest::Approx(std::pow(0.5, u.alpha())).epsilon(1e-14));
    CHECK(u.in_sector(Vec2(0.5, -0.5 * eps + 1e-9)));
    CHECK_FALSE(u.in_sector(Vec2(0.5, -0.5 * eps - 1e-9)));
    CHECK_FALSE(u.in_sector(Vec2(0, 1.0)));
  }
}

TEST_CASE("corner solution is harmonic") {
  for (double eps : {0.2, 1.0}) {
    const auto u = corner_exact(eps);
    const std::function<double(double, double)> f = [&](double x, double y) { return u.value(Vec2(x, y)); };
    // Points at r >= 0.2 well inside the sector.
    std::vector<Vec2> pts;
    for (double r : {0.2, 0.45, 0.8})
      for (double phi = -u.ray_angle() + 0.3; phi < pi + u.ray_angle() - 0.3; phi += 0.37)
        pts.emplace_back(r * std::cos(phi), r * std::sin(phi));
    std::vector<double> worst;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      double w = 0.0;
      for (const auto& p : pts) w = std::max(w, std::abs(oracle::laplacian5(f, p.x(), p.y(), h)));
      worst.push_back(w);
    }
    // Second order truncation: each halving divides the residual by 4.
    for (std::size_t k = 1; k < worst.size(); ++k) {
      CHECK(worst[k - 1] / worst[k] > 3.5);
      CHECK(worst[k - 1] / worst[k] < 4.5);
    }
    for (const auto& p : pts) {
      double gx = 0, gy = 0;
      oracle::gradient_cd(f, p.x(), p.y(), 1e-5, gx, gy);
      CHECK((u.gradient(p) - Vec2(gx, gy)).norm() <= 1e-7 * u.gradient(p).norm());
      CHECK(u.gradient(p).norm() == doctest::Approx(u.gradient_norm(p.norm())).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(corner_exact(0.5).gradient(Vec2::Zero()), Error);
}

TEST_CASE("polar angle runs over the lower half line") {
  CHECK(CornerSolution::polar_angle(Vec2(1, 0)) == 0.0);
  CHECK(CornerSolution::polar_angle(Vec2(-1, -1e-3)) > pi);
  CHECK(CornerSolution::polar_angle(Vec2(1, -1e-3)) < 0.0);
  CHECK(CornerSolution::polar_angle(Vec2(0, -1)) == doctest::Approx(-pi / 2));
}

TEST_CASE("gradient power integral against the closed form") {
  for (double eps : {0.1, 0.5, 1.0})
    for (double q : {2.0, 3.0, 7.5}) {
      const auto u = corner_exact(eps);
      for (auto [r0, r1] : {std::pair{1e-3, 1.0}, {0.25, 0.5}, {0.1, 0.7}}) {
        const double got = corner_gradient_power_integral(u, q, r0, r1);
        CHECK(got == doctest::Approx(closed_form_integral(eps, q, r0, r1)).epsilon(1e-11));
      }
    }
  // The angular part on its own, through the oracle quadrature.
  const auto u = corner_exact(0.4);
  const double r = 0.3;
  const double ring = oracle::simpson(
      [&](double phi) { return std::pow(u.gradient(Vec2(r * std::cos(phi), r * std::sin(phi))).norm(), 3.0); },
      -u.ray_angle(), pi + u.ray_angle(), 1e-13);
  CHECK(ring == doctest::Approx((pi + 2 * std::atan(0.4)) * std::pow(u.gradient_norm(r), 3.0)).epsilon(1e-11));
  CHECK_THROWS_AS(corner_gradient_power_integral(u, 3.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(corner_gradient_power_integral(u, 3.0, 0.5, 0.5), Error);
}

TEST_CASE("q = 3 norm at eps = 1") {
  const auto fit = threshold_fit(1.0, {3.0});
  const auto& last = fit.rows.back();
  CHECK(last.k == 12);
  // (4 pi / 9) (1 - 2^-12) exactly, since the integrand is 1/r times a constant.
  CHECK(std::pow(last.norm, 3.0) == doctest::Approx(4 * pi / 9 * (1 - std::ldexp(1.0, -12))).epsilon(1e-12));
  CHECK(std::abs(last.norm - std::cbrt(4 * pi / 9)) / std::cbrt(4 * pi / 9) < 0.01);
  CHECK_FALSE(fit.classes[0].divergent);
}

TEST_CASE("threshold fit at eps = 1") {
  const auto fit = threshold_fit(1.0, default_q_grid(1.0));
  CHECK_FALSE(fit.inconclusive);
  CHECK(fit.q_hat >= 5.5);
  CHECK(fit.q_hat <= 6.5);
  CHECK(fit.q_star_analytic == doctest::Approx(6.0));
  CHECK(fit.rows.size() == 40 * 9);
  // Monotone classification: once divergent, always divergent.
  bool seen = false;
  for (const auto& c : fit.classes) {
    if (seen) CHECK(c.divergent);
    seen = seen || c.divergent;
  }
  for (const auto& r : fit.rows) CHECK(std::abs(std::pow(r.norm, r.q) -
                                                closed_form_integral(1.0, r.q, std::ldexp(1.0, -r.k), 1.0)) <=
                                       1e-10 * std::pow(r.norm, r.q));
}

TEST_CASE("threshold fit inconclusive grids") {
  const auto low = threshold_fit(1.0, {3.0, 4.0, 5.0});
  CHECK(low.inconclusive);
  CHECK(std::isnan(low.q_hat));
  CHECK(low.to_json()["q_hat"].is_null());
  CHECK(low.to_json()["inconclusive"] == true);
  const auto high = threshold_fit(1.0, {9.0, 12.0});
  CHECK(high.inconclusive);
  CHECK(high.classes[0].divergent);
  CHECK_THROWS_AS(threshold_fit(1.0, {}), Error);
  CHECK_THROWS_AS(threshold_fit(1.0, {0.5}), Error);
  CHECK_THROWS_AS(threshold_fit(1.0, {3.0}, ThresholdConfig{4, 6, 0.1}), Error);
  CHECK_THROWS_AS(threshold_fit(1.5, {3.0}), Error);
}

TEST_CASE("threshold fit output formats") {
  const auto fit = threshold_fit(1.0, {3.0, 9.0});
  const std::string csv = fit.to_csv();
  CHECK(csv.rfind("epsilon,q,annulus_k,norm,classification\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 2 * 9);
  CHECK(csv.find(",divergent") != std::string::npos);
  CHECK(csv.find(",convergent") != std::string::npos);
  const auto j = fit.to_json();
  CHECK(j["q_hat"].is_number());
  CHECK(j["classes"].size() == 2);
  CHECK(j["classes"][1]["classification"] == "divergent");
  CHECK(j["epsilon"] == 1.0);
}

TEST_CASE("default q grid") {
  const auto g = default_q_grid(1.0);
  CHECK(g.size() == 40);
  CHECK(g.front() == 3.0);
  CHECK(g.back() == doctest::Approx(10.0));
  CHECK(default_q_grid(0.2, 7).back() == doctest::Approx(2 + 2 * pi / std::atan(0.2)));
}

TEST_CASE("fit through the origin") {
  const auto f = fit_through_origin({1, 2, 3}, {2, 4, 6});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  // Hand computed: slope = (1 + 6 + 15) / 14, residuals (1 - 22/14, 3 - 44/14, 5 - 66/14).
  const auto g = fit_through_origin({1, 2, 3}, {1, 3, 5});
  CHECK(g.slope == doctest::Approx(22.0 / 14.0));
  const double s = 22.0 / 14.0;
  const double ss = std::pow(1 - s, 2) + std::pow(3 - 2 * s, 2) + std::pow(5 - 3 * s, 2);
  CHECK(g.r_squared == doctest::Approx(1 - ss / 35.0));
  CHECK_THROWS_AS(fit_through_origin({1, 2}, {1}), Error);
  CHECK_THROWS_AS(fit_through_origin({0, 0}, {1, 1}), Error);
}
