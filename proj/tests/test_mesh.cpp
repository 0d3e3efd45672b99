#include "wplap/error.hpp"
#include "wplap/mesh.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace wplap;

namespace {

double total_area(const Mesh& m) {
  double s = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) s += m.triangle_area(t);
  return s;
}

const std::vector<Vec2> kLShape{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};

}  // namespace

TEST_CASE("unit square with h = 0.5") {
  const Mesh m = mesh_generate(rectangle_domain(Vec2(0, 0), Vec2(1, 1)), 0.5);
  CHECK(m.num_triangles() == 8);
  CHECK(m.num_nodes() == 9);
  m.validate();
  int boundary = 0;
  for (char b : m.boundary) boundary += b;
  CHECK(boundary == 8);
  CHECK(total_area(m) == doctest::Approx(1.0));
}

TEST_CASE("corner domain mesh quality") {
  const auto d = corner_domain(1.0);
  const Mesh m = mesh_generate(d, 0.1);
  m.validate();
  const auto q = mesh_quality(m);
  CHECK(q.min_area > 0.0);
  CHECK(q.min_angle_deg >= 20.0);
  CHECK(q.max_edge <= 0.1 * (1.0 + 1e-9));
  CHECK(total_area(m) == doctest::Approx(d.area()).epsilon(1e-12));
  // The corner is a mesh node.
  bool origin = false;
  for (const auto& x : m.nodes) origin = origin || x.norm() == 0.0;
  CHECK(origin);
}

TEST_CASE("graded corner mesh is finer near the anchor") {
  const auto d = corner_domain(0.5, 128);
  Grading g;
  g.exponent = 0.5;
  const Mesh graded = mesh_generate(d, 0.1, g);
  graded.validate();
  CHECK(mesh_quality(graded).min_angle_deg >= 20.0);
  double near = 1.0, far = 0.0;
  for (std::size_t t = 0; t < graded.num_triangles(); ++t) {
    const double r = graded.centroid(t).norm();
    double lmax = 0.0;
    const auto& tri = graded.triangles[t];
    for (int k = 0; k < 3; ++k) lmax = std::max(lmax, (graded.nodes[tri[k]] - graded.nodes[tri[(k + 1) % 3]]).norm());
    if (r < 0.02) near = std::min(near, lmax);
    if (r > 0.8) far = std::max(far, lmax);
  }
  CHECK(near < 0.03);
  CHECK(far > 0.05);
  CHECK(graded.num_nodes() > mesh_generate(d, 0.1).num_nodes());
  CHECK_THROWS_AS(mesh_generate(d, 0.1, Grading{Vec2::Zero(), 1.5}), Error);
}

TEST_CASE("node count roughly quadruples when h halves") {
  const PolygonalDomain l(kLShape);
  std::size_t prev = mesh_generate(l, 0.2).num_nodes();
  for (double h : {0.1, 0.05}) {
    const std::size_t n = mesh_generate(l, h).num_nodes();
    CHECK(static_cast<double>(n) / prev == doctest::Approx(4.0).epsilon(0.2));
    prev = n;
  }
}

TEST_CASE("uniform refinement") {
  const Mesh coarse = mesh_generate(PolygonalDomain(kLShape), 0.25);
  const Mesh fine = refine_uniform(coarse);
  fine.validate();
  CHECK(fine.num_triangles() == 4 * coarse.num_triangles());
  CHECK(total_area(fine) == doctest::Approx(total_area(coarse)).epsilon(1e-13));
  CHECK(mesh_quality(fine).min_angle_deg == doctest::Approx(mesh_quality(coarse).min_angle_deg).epsilon(1e-9));
  int bc = 0, bf = 0;
  for (char b : coarse.boundary) bc += b;
  for (char b : fine.boundary) bf += b;
  CHECK(bf == 2 * bc);
}

TEST_CASE("disk mesh is symmetric") {
  const Mesh d = disk_mesh(1.0, 8, 4);
  d.validate();
  CHECK(total_area(d) < std::numbers::pi);
  CHECK(total_area(d) > 0.95 * std::numbers::pi);
  // Every node rotated by 2 pi / 8 or reflected across the x axis is a node.
  const double a = 2.0 * std::numbers::pi / 8.0;
  for (const auto& x : d.nodes) {
    const Vec2 rot(std::cos(a) * x.x() - std::sin(a) * x.y(), std::sin(a) * x.x() + std::cos(a) * x.y());
    const Vec2 ref(x.x(), -x.y());
    double drot = 1.0, dref = 1.0;
    for (const auto& y : d.nodes) {
      drot = std::min(drot, (y - rot).norm());
      dref = std::min(dref, (y - ref).norm());
    }
    CHECK(drot <= 1e-12);
    CHECK(dref <= 1e-12);
  }
}

TEST_CASE("mesh file roundtrip and errors") {
  const auto dir = std::filesystem::temp_directory_path() / "wplap_mesh_io";
  std::filesystem::create_directories(dir);
  const Mesh m = mesh_generate(corner_domain(0.3, 32), 0.2);
  write_mesh(m, dir / "m.txt");
  const Mesh r = read_mesh(dir / "m.txt");
  REQUIRE(r.num_nodes() == m.num_nodes());
  REQUIRE(r.num_triangles() == m.num_triangles());
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    CHECK(r.nodes[i] == m.nodes[i]);
    CHECK(r.boundary[i] == m.boundary[i]);
  }
  CHECK(r.triangles == m.triangles);
  {
    std::ifstream in(dir / "m.txt");
    std::size_t nn = 0, nt = 0;
    in >> nn >> nt;
    CHECK(nn == m.num_nodes());
    CHECK(nt == m.num_triangles());
  }
  try {
    read_mesh(dir / "missing.txt");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
  {
    std::ofstream out(dir / "bad.txt");
    out << "3 1\n0 0 1\n1 0 1\n";
  }
  CHECK_THROWS_AS(read_mesh(dir / "bad.txt"), Error);
}

TEST_CASE("validate catches broken meshes") {
  Mesh m = structured_rectangle(Vec2(0, 0), Vec2(1, 1), 2, 2);
  m.validate();
  Mesh flipped = m;
  std::swap(flipped.triangles[0][1], flipped.triangles[0][2]);
  try {
    flipped.validate();
    FAIL("expected mesh error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::mesh);
  }
  Mesh flags = m;
  flags.boundary[4] = 1;  // center node
  CHECK_THROWS_AS(flags.validate(), Error);
}

TEST_CASE("point location") {
  const Mesh m = mesh_generate(PolygonalDomain(kLShape), 0.3);
  const PointLocator loc(m);
  for (std::size_t t = 0; t < m.num_triangles(); t += 7) {
    const Vec2 c = m.centroid(t);
    const auto hit = loc.locate(c);
    REQUIRE(hit.has_value());
    CHECK(hit->triangle == t);
    for (double b : hit->barycentric) CHECK(b == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
  CHECK_FALSE(loc.locate(Vec2(1.5, 1.5)).has_value());
  CHECK_FALSE(loc.locate(Vec2(-1.0, 0.5)).has_value());
}

TEST_CASE("basis gradients sum to zero and reproduce linear functions") {
  const Mesh m = mesh_generate(corner_domain(0.6, 64), 0.2);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto g = m.basis_gradients(t);
    CHECK((g[0] + g[1] + g[2]).norm() <= 1e-10);
    Vec2 grad = Vec2::Zero();
    for (int k = 0; k < 3; ++k) {
      const Vec2& x = m.nodes[m.triangles[t][k]];
      grad += (2.0 * x.x() - 3.0 * x.y()) * g[k];
    }
    CHECK((grad - Vec2(2.0, -3.0)).norm() <= 1e-9);
  }
}
