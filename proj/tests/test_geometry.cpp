#include "wplap/error.hpp"
#include "wplap/geometry.hpp"

#include "doctest.h"
#include "oracles/polygon_disk.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace wplap;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryChart line_chart(double slope) {
  BoundaryChart c;
  c.anchor = Vec2::Zero();
  c.breakpoints = {{-10.0, -10.0 * slope}, {10.0, 10.0 * slope}};
  c.radius = 1.0;
  return c;
}

std::vector<oracle::P2> to_p2(const std::vector<Vec2>& v) {
  std::vector<oracle::P2> out;
  for (const auto& x : v) out.push_back({x.x(), x.y()});
  return out;
}

// Zigzag bottom boundary on [-2, 2] with slopes 0.1 and -0.3, flat top at y = 2.
PolygonalDomain sawtooth(double chart_radius) {
  std::vector<Vec2> bottom;
  double y = 0.0;
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (double x = 0.0; x < 2.0 - 1e-12; x += 0.5) {
    y += (std::fmod(x, 1.0) < 0.25 ? 0.1 : -0.3) * 0.5;
    pts.emplace_back(x + 0.5, y);
  }
  y = 0.0;
  for (double x = 0.0; x > -2.0 + 1e-12; x -= 0.5) {
    y -= (std::fmod(-x + 0.5, 1.0) < 0.25 ? 0.1 : -0.3) * 0.5;
    pts.insert(pts.begin(), {x - 0.5, y});
  }
  std::vector<Vec2> v;
  for (const auto& [px, py] : pts) v.emplace_back(px, py);
  v.emplace_back(2.0, 2.0);
  v.emplace_back(-2.0, 2.0);

  BoundaryChart c;
  c.anchor = Vec2::Zero();
  c.breakpoints = pts;
  c.radius = chart_radius;
  std::vector<bool> charted(v.size(), false);
  // Bottom edges with both ends in |x| <= 1.
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (std::abs(pts[i].first) <= 1.0 && std::abs(pts[i + 1].first) <= 1.0) charted[i] = true;
  return PolygonalDomain(v, {c}, charted, 0.3, chart_radius);
}

}  // namespace

TEST_CASE("Lipschitz parameter of simple charts") {
  CHECK(line_chart(0.0).max_slope() == 0.0);
  // Half-plane: only the bottom edge of a large square is charted, with psi = 0.
  const std::vector<Vec2> sq{{-1, 0}, {1, 0}, {1, 2}, {-1, 2}};
  const PolygonalDomain half(sq, {line_chart(0.0)}, {true, false, false, false}, 0.0, 1.0);
  CHECK(lipschitz_params(half, 1.0) == 0.0);

  const auto saw = sawtooth(1.05);
  CHECK(lipschitz_params(saw, 1.0) == doctest::Approx(0.3).epsilon(1e-14));
  const auto audit = verify_chart(saw, saw.charts()[0], 20000, 3);
  CHECK(audit.mismatches == 0);
  try {
    lipschitz_params(saw, 2.0);
    FAIL("expected a coverage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::coverage);
  }
}

TEST_CASE("corner domains") {
  for (double eps : {0.2, 0.5, 1.0}) {
    const auto d = corner_domain(eps);
    CHECK(lipschitz_params(d, 1.0) == doctest::Approx(eps).epsilon(1e-14));
    CHECK(d.declared_delta() == eps);
    CHECK(d.interior_angle(0) == doctest::Approx(kPi + 2.0 * std::atan(eps)).epsilon(1e-12));
    const auto audit = verify_chart(d, d.charts()[0], 20000, 1);
    CHECK(audit.mismatches == 0);
    CHECK(d.outside_theory() == (eps > 0.25));
  }
  CHECK(corner_domain(1.0).interior_angle(0) == doctest::Approx(1.5 * kPi).epsilon(1e-14));
  for (double bad : {0.0, -0.1, 1.0001, 2.0}) {
    try {
      corner_domain(bad);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
  }
}

TEST_CASE("corner domain area converges like 1/m^2") {
  for (double eps : {0.2, 1.0}) {
    const double exact = (kPi + 2.0 * std::atan(eps)) / 2.0;
    const double e64 = exact - corner_domain(eps, 64).area();
    const double e128 = exact - corner_domain(eps, 128).area();
    CHECK(e64 > 0.0);
    CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.01));
    // Inscribed chords: exact - area = (sweep - m sin(sweep / m)) / 2 <= sweep^3 / (12 m^2).
    const double sweep = 2.0 * exact;
    CHECK(std::abs(exact - corner_domain(eps, 256).area()) <= std::pow(sweep, 3) / (12.0 * 256 * 256));
  }
  // Small eps approaches the half disk.
  CHECK(corner_domain(1e-6).area() == doctest::Approx(kPi / 2.0).epsilon(1e-4));
}

TEST_CASE("flattening map") {
  const auto flat = line_chart(0.0);
  const Vec2 x(0.3, -0.7);
  CHECK(flatten(flat, x) == x);
  const auto half = line_chart(0.5);
  const Vec2 y = flatten(half, Vec2(1.0, 1.0));
  CHECK(y.x() == 1.0);
  CHECK(y.y() == 0.5);
  CHECK(flatten_jacobian(half, Vec2(1.0, 1.0)).determinant() == 1.0);

  const auto saw = sawtooth(1.05);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 p(u(rng), u(rng));
    const auto& c = saw.charts()[0];
    CHECK((unflatten(c, flatten(c, p)) - p).norm() <= 1e-14);
    const Mat j = flatten_jacobian(c, p);
    CHECK(j.determinant() == 1.0);
    CHECK(operator_norm(Mat::Identity(2, 2) - j) <= 2.0 * c.max_slope() + 1e-15);
  }
}

TEST_CASE("flattened balls are sandwiched between half and double balls") {
  BoundaryChart c;
  c.anchor = Vec2::Zero();
  c.breakpoints = {{-2.0, 0.0}, {-1.0, 0.25}, {0.0, 0.0}, {0.5, 0.125}, {1.5, -0.125}};
  c.radius = 1.0;
  REQUIRE(c.max_slope() <= 0.25);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int b = 0; b < 300; ++b) {
    const Vec2 y(u(rng), u(rng));
    const double r = 0.05 + std::abs(u(rng));
    const Vec2 fy = flatten(c, y);
    for (int k = 0; k < 256; ++k) {
      const double a = 2.0 * kPi * k / 256.0;
      const Vec2 x = y + r * Vec2(std::cos(a), std::sin(a));
      const double d = (flatten(c, x) - fy).norm();
      CHECK(d >= 0.5 * r);
      CHECK(d <= 2.0 * r);
    }
  }
}

TEST_CASE("chart images of the boundary lie on the flat line") {
  const auto d = corner_domain(0.7);
  const auto& c = d.charts()[0];
  for (std::size_t e : {std::size_t{0}, d.num_edges() - 1}) {
    const Segment s = d.edge(e);
    for (int k = 0; k <= 50; ++k) {
      const Vec2 p = s.a + (k / 50.0) * (s.b - s.a);
      CHECK(std::abs(flatten(c, c.to_local(p)).y()) <= 1e-12);
    }
  }
}

TEST_CASE("polygon validation") {
  const auto expect_mesh_error = [](std::vector<Vec2> v) {
    try {
      PolygonalDomain d(std::move(v));
      FAIL("expected a mesh error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::mesh);
    }
  };
  expect_mesh_error({{0, 0}, {1, 0}});
  expect_mesh_error({{0, 0}, {1, 0}, {1, 0}, {0, 1}});
  expect_mesh_error({{0, 0}, {1, 0}, {2, 0}});
  expect_mesh_error({{0, 0}, {1, 1}, {1, 0}, {0, 1}});

  const PolygonalDomain cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(cw.area() == doctest::Approx(1.0));
  double signed_area = 0.0;
  const auto& v = cw.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    signed_area += 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  CHECK(signed_area == doctest::Approx(1.0));
  CHECK(cw.is_axis_rectangle());
}

TEST_CASE("polygon queries") {
  const PolygonalDomain l({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  CHECK(l.area() == doctest::Approx(3.0));
  CHECK(l.contains(Vec2(0.5, 1.5)));
  CHECK_FALSE(l.contains(Vec2(1.5, 1.5)));
  CHECK(l.boundary_distance(Vec2(0.5, 0.5)) == doctest::Approx(0.5));
  CHECK(l.interior_angle(3) == doctest::Approx(1.5 * kPi));
  CHECK(l.interior_angle(0) == doctest::Approx(0.5 * kPi));
  CHECK_FALSE(l.is_axis_rectangle());
  const auto [lo, hi] = l.bounding_box();
  CHECK(lo == Vec2(0, 0));
  CHECK(hi == Vec2(2, 2));
  // Automatic charts certify every edge.
  CHECK(lipschitz_params(l, l.declared_r()) == doctest::Approx(l.declared_delta()));
  for (const auto& c : l.charts()) CHECK(verify_chart(l, c, 2000, 5).mismatches == 0);
  CHECK(point_segment_distance(Vec2(0.5, 1.0), Segment{Vec2(0, 0), Vec2(1, 0)}) == doctest::Approx(1.0));
}

TEST_CASE("domains from JSON") {
  const auto c = domain_from_json({{"type", "corner"}, {"epsilon", 1.0}, {"chords", 64}});
  CHECK(c.num_edges() == 66);
  const auto p = domain_from_json({{"type", "polygon"}, {"vertices", {{0, 0}, {1, 0}, {0, 1}}}});
  CHECK(p.area() == doctest::Approx(0.5));
  const auto r = domain_from_json({{"type", "rectangle"}, {"lo", {0, 0}}, {"hi", {2, 1}}});
  CHECK(r.is_axis_rectangle());
  for (const nlohmann::json& bad :
       {nlohmann::json{{"type", "blob"}}, nlohmann::json{{"epsilon", 1.0}}, nlohmann::json{{"type", "corner"}},
        nlohmann::json{{"type", "polygon"}, {"vertices", {{0, 0}, {1}}}}}) {
    try {
      domain_from_json(bad);
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
  }
  CHECK(c.describe().is_object());
}

TEST_CASE("measure density: half plane and corner ball") {
  const PolygonalDomain big({{-10, 0}, {10, 0}, {10, 10}, {-10, 10}});
  const std::size_t n = 40000;
  const double sigma = std::sqrt(0.25 / n);
  const double half = mc_inside_fraction(big, Vec2::Zero(), 1.0, n, 1);
  CHECK(std::abs(half - 0.5) <= 4.0 * sigma);
  CHECK(oracle::polygon_disk_area(to_p2(big.vertices()), {0, 0}, 1.0) / kPi == doctest::Approx(0.5).epsilon(1e-14));

  const auto corner = corner_domain(1.0);
  const double exact_out = 1.0 - oracle::polygon_disk_area(to_p2(corner.vertices()), {0, 0}, 0.5) / (kPi * 0.25);
  CHECK(exact_out == doctest::Approx(0.25).epsilon(1e-12));
  const double mc_out = 1.0 - mc_inside_fraction(corner, Vec2::Zero(), 0.5, n, 2);
  CHECK(std::abs(mc_out - 0.25) <= 4.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("measure density on corner_domain(0.2)") {
  const auto d = corner_domain(0.2);
  MeasureDensityConfig cfg;
  cfg.seed = 42;
  const auto rep = measure_density(d, cfg);
  CHECK(rep.balls == 10000);
  CHECK(rep.violations_upper == 0);
  CHECK(rep.violations_lower == 0);
  CHECK(rep.within_hypotheses);
  CHECK(rep.sup_ball_over_inside <= 16.0);
  CHECK(rep.inf_outside_fraction >= 1.0 / 16.0);

  // Subset cross-check of the Monte-Carlo fractions against exact areas.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0), lr(std::log(1e-3), 0.0);
  const auto poly = to_p2(d.vertices());
  int checked = 0;
  while (checked < 200) {
    const Vec2 y(u(rng), u(rng));
    if (!d.contains(y)) continue;
    const double r = std::exp(lr(rng));
    const double exact = oracle::polygon_disk_area(poly, {y.x(), y.y()}, r) / (kPi * r * r);
    CHECK(1.0 / exact <= 16.0);
    const std::size_t n = 4096;
    const double mc = mc_inside_fraction(d, y, r, n, 100 + checked);
    CHECK(std::abs(mc - exact) <= 4.5 * std::sqrt(std::max(exact * (1 - exact), 1e-4) / n) + 1e-12);
    ++checked;
  }
}

TEST_CASE("measure density flags domains outside the hypotheses") {
  MeasureDensityConfig cfg;
  cfg.interior_balls = 200;
  cfg.boundary_balls = 200;
  CHECK_FALSE(measure_density(corner_domain(1.0), cfg).within_hypotheses);
  CHECK(measure_density(corner_domain(1.0), cfg).to_json().contains("within_hypotheses"));
}
