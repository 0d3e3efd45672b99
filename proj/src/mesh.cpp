#include "wplap/mesh.hpp"

#include "delaunay.hpp"
#include "wplap/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace wplap {

namespace {

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

double angle_at(const Vec2& p, const Vec2& q, const Vec2& r) {
  const Vec2 u = q - p, v = r - p;
  return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
}

}  // namespace

double Mesh::triangle_area(std::size_t t) const {
  const auto& [i, j, k] = triangles[t];
  const Vec2 u = nodes[j] - nodes[i], v = nodes[k] - nodes[i];
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

Vec2 Mesh::centroid(std::size_t t) const {
  const auto& [i, j, k] = triangles[t];
  return (nodes[i] + nodes[j] + nodes[k]) / 3.0;
}

std::array<Vec2, 3> Mesh::basis_gradients(std::size_t t) const {
  const auto& tri = triangles[t];
  const double two_area = 2.0 * triangle_area(t);
  std::array<Vec2, 3> g;
  for (int a = 0; a < 3; ++a) {
    const Vec2& p = nodes[tri[(a + 1) % 3]];
    const Vec2& q = nodes[tri[(a + 2) % 3]];
    // Rotated opposite edge, scaled so that the gradient dotted with (x_a - p) is 1.
    g[a] = Vec2(p.y() - q.y(), q.x() - p.x()) / two_area;
  }
  return g;
}

double Mesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : triangles) {
    for (int a = 0; a < 3; ++a) m = std::max(m, (nodes[t[a]] - nodes[t[(a + 1) % 3]]).norm());
  }
  return m;
}

void Mesh::validate() const {
  require(!triangles.empty(), ErrorKind::mesh, "mesh has no triangles");
  require(boundary.size() == nodes.size(), ErrorKind::mesh, "mesh boundary flags do not match node count");
  std::vector<char> used(nodes.size(), 0);
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int v : triangles[t]) {
      require(v >= 0 && static_cast<std::size_t>(v) < nodes.size(), ErrorKind::mesh,
              "triangle " + std::to_string(t) + " references a missing node");
      used[v] = 1;
    }
    require(triangle_area(t) > 0.0, ErrorKind::mesh, "triangle " + std::to_string(t) + " has non-positive area");
    for (int a = 0; a < 3; ++a) {
      const int u = triangles[t][a], w = triangles[t][(a + 1) % 3];
      edges[edge_key(u, w)].emplace_back(u, w);
    }
  }
  std::vector<char> on_boundary_edge(nodes.size(), 0);
  for (const auto& [key, uses] : edges) {
    require(uses.size() <= 2, ErrorKind::mesh, "mesh edge shared by more than two triangles");
    if (uses.size() == 2) {
      require(uses[0].first == uses[1].second, ErrorKind::mesh, "mesh triangles have inconsistent orientation");
    } else {
      require(boundary[key.first] && boundary[key.second], ErrorKind::mesh,
              "boundary edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                  ") has unflagged endpoint");
      on_boundary_edge[key.first] = on_boundary_edge[key.second] = 1;
    }
  }
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    require(used[v], ErrorKind::mesh, "node " + std::to_string(v) + " is not used by any triangle");
    require(!boundary[v] || on_boundary_edge[v], ErrorKind::mesh,
            "node " + std::to_string(v) + " is flagged boundary but lies on no boundary edge");
  }
}

MeshQuality mesh_quality(const Mesh& mesh) {
  MeshQuality q;
  q.min_angle_deg = 180.0;
  q.min_area = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& [i, j, k] = mesh.triangles[t];
    const Vec2 &a = mesh.nodes[i], &b = mesh.nodes[j], &c = mesh.nodes[k];
    for (double ang : {angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)}) {
      q.min_angle_deg = std::min(q.min_angle_deg, ang * 180.0 / std::numbers::pi);
      q.max_angle_deg = std::max(q.max_angle_deg, ang * 180.0 / std::numbers::pi);
    }
    q.min_area = std::min(q.min_area, mesh.triangle_area(t));
  }
  q.max_edge = mesh.max_edge_length();
  return q;
}

Mesh structured_rectangle(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  require(nx >= 1 && ny >= 1 && hi.x() > lo.x() && hi.y() > lo.y(), ErrorKind::mesh,
          "structured_rectangle: need nx, ny >= 1 and a non-empty box");
  Mesh m;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.nodes.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny);
      m.boundary.push_back(i == 0 || j == 0 || i == nx || j == ny ? 1 : 0);
    }
  }
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  m.h = m.max_edge_length();
  return m;
}

Mesh disk_mesh(double radius, int sectors, int rings) {
  require(radius > 0.0 && sectors >= 3 && rings >= 1, ErrorKind::mesh,
          "disk_mesh: need radius > 0, sectors >= 3, rings >= 1");
  Mesh m;
  m.nodes.emplace_back(0.0, 0.0);
  m.boundary.push_back(0);
  // Ring j holds sectors * j nodes; node (sector i, position q) on ring j has
  // angular index i * j + q.
  std::vector<int> ring_start(rings + 1, 0);
  for (int j = 1; j <= rings; ++j) {
    ring_start[j] = static_cast<int>(m.nodes.size());
    for (int i = 0; i < sectors; ++i) {
      const double a0 = 2.0 * std::numbers::pi * i / sectors;
      const double a1 = 2.0 * std::numbers::pi * (i + 1) / sectors;
      const Vec2 e0(std::cos(a0), std::sin(a0)), e1(std::cos(a1), std::sin(a1));
      for (int q = 0; q < j; ++q) {
        const Vec2 chord = (1.0 - static_cast<double>(q) / j) * e0 + (static_cast<double>(q) / j) * e1;
        m.nodes.push_back(chord.normalized() * (radius * j / rings));
        m.boundary.push_back(j == rings ? 1 : 0);
      }
    }
  }
  auto id = [&](int j, int i, int q) {
    if (j == 0) return 0;
    const int count = sectors * j;
    return ring_start[j] + ((i * j + q) % count);
  };
  for (int i = 0; i < sectors; ++i) {
    for (int j = 0; j < rings; ++j) {
      for (int q = 0; q <= j; ++q) {
        m.triangles.push_back({id(j, i, q), id(j + 1, i, q), id(j + 1, i, q + 1)});
        if (q < j) m.triangles.push_back({id(j, i, q), id(j + 1, i, q + 1), id(j, i, q + 1)});
      }
    }
  }
  m.h = m.max_edge_length();
  m.validate();
  return m;
}

Mesh mesh_generate(const PolygonalDomain& domain, double h, const std::optional<Grading>& grading) {
  require(h > 0.0 && std::isfinite(h), ErrorKind::invalid_input, "mesh_generate: h must be positive");
  const bool graded = grading && grading->exponent != 0.0;
  if (graded) {
    require(grading->exponent > 0.0 && grading->exponent < 1.0, ErrorKind::invalid_input,
            "mesh_generate: grading exponent must lie in (0, 1)");
  }
  if (!graded && domain.is_axis_rectangle()) {
    const auto [lo, hi] = domain.bounding_box();
    const int nx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / h - 1e-12)));
    const int ny = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / h - 1e-12)));
    Mesh m = structured_rectangle(lo, hi, nx, ny);
    m.validate();
    return m;
  }
  std::function<double(const Vec2&)> size = [h](const Vec2&) { return h; };
  if (graded) {
    const double g = grading->exponent;
    const double floor_d = std::pow(h, 1.0 / (1.0 - g));
    const Vec2 anchor = grading->anchor;
    size = [h, g, floor_d, anchor](const Vec2& x) { return h * std::pow(std::max((x - anchor).norm(), floor_d), g); };
  }
  auto refined = detail::refine_polygon(domain, size);
  Mesh m;
  m.nodes = std::move(refined.nodes);
  m.triangles = std::move(refined.triangles);
  m.boundary = std::move(refined.boundary);
  m.h = m.max_edge_length();
  m.validate();
  return m;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.nodes = mesh.nodes;
  out.boundary = mesh.boundary;
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : mesh.triangles) {
    for (int a = 0; a < 3; ++a) ++uses[edge_key(t[a], t[(a + 1) % 3])];
  }
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    out.boundary.push_back(uses[key] == 1 ? 1 : 0);
    mid.emplace(key, id);
    return id;
  };
  for (const auto& [a, b, c] : mesh.triangles) {
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }
  out.h = out.max_edge_length();
  return out;
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) raise(ErrorKind::io, "cannot write mesh file " + path.string());
  os.precision(17);
  os << mesh.num_nodes() << ' ' << mesh.num_triangles() << '\n';
  for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
    os << mesh.nodes[v].x() << ' ' << mesh.nodes[v].y() << ' ' << static_cast<int>(mesh.boundary[v]) << '\n';
  }
  for (const auto& [i, j, k] : mesh.triangles) os << i << ' ' << j << ' ' << k << '\n';
  if (!os) raise(ErrorKind::io, "failed writing mesh file " + path.string());
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) raise(ErrorKind::io, "cannot open mesh file " + path.string());
  std::size_t nn = 0, nt = 0;
  if (!(is >> nn >> nt)) raise(ErrorKind::io, "mesh file " + path.string() + ": bad count line");
  Mesh m;
  m.nodes.resize(nn);
  m.boundary.resize(nn);
  for (std::size_t v = 0; v < nn; ++v) {
    double x = 0, y = 0;
    int flag = 0;
    if (!(is >> x >> y >> flag)) raise(ErrorKind::io, "mesh file " + path.string() + ": bad node row " + std::to_string(v));
    m.nodes[v] = Vec2(x, y);
    m.boundary[v] = flag != 0 ? 1 : 0;
  }
  m.triangles.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto& tri = m.triangles[t];
    if (!(is >> tri[0] >> tri[1] >> tri[2])) {
      raise(ErrorKind::io, "mesh file " + path.string() + ": bad triangle row " + std::to_string(t));
    }
  }
  m.validate();
  m.h = m.max_edge_length();
  return m;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  require(mesh.num_triangles() > 0, ErrorKind::mesh, "PointLocator: empty mesh");
  Vec2 lo = mesh.nodes.front(), hi = mesh.nodes.front();
  for (const auto& p : mesh.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-300);
  const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_triangles()))));
  cell_ = span / target;
  lo_ = lo;
  nx_ = std::max(1, static_cast<int>((hi.x() - lo.x()) / cell_) + 1);
  ny_ = std::max(1, static_cast<int>((hi.y() - lo.y()) / cell_) + 1);
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 tlo = mesh.nodes[mesh.triangles[t][0]], thi = tlo;
    for (int v : mesh.triangles[t]) {
      tlo = tlo.cwiseMin(mesh.nodes[v]);
      thi = thi.cwiseMax(mesh.nodes[v]);
    }
    const int i0 = std::clamp(static_cast<int>((tlo.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((thi.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((tlo.y() - lo_.y()) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((thi.y() - lo_.y()) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

std::optional<PointLocator::Hit> PointLocator::locate(const Vec2& p) const {
  const int i = static_cast<int>(std::floor((p.x() - lo_.x()) / cell_));
  const int j = static_cast<int>(std::floor((p.y() - lo_.y()) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
  std::optional<Hit> best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (std::size_t t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& tri = mesh_->triangles[t];
    const Vec2 &a = mesh_->nodes[tri[0]], &b = mesh_->nodes[tri[1]], &c = mesh_->nodes[tri[2]];
    const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    const double l1 = ((p - a).x() * (c - a).y() - (p - a).y() * (c - a).x()) / det;
    const double l2 = ((b - a).x() * (p - a).y() - (b - a).y() * (p - a).x()) / det;
    const double l0 = 1.0 - l1 - l2;
    const double lmin = std::min({l0, l1, l2});
    if (lmin > best_min) {
      best_min = lmin;
      best = Hit{t, {l0, l1, l2}};
    }
  }
  if (!best || best_min < -1e-10) return std::nullopt;
  return best;
}

}  // namespace wplap
