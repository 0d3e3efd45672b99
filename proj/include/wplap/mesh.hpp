#pragma once

#include "wplap/geometry.hpp"
#include "wplap/linalg.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

namespace wplap {

/// P1 triangulation. Triangles are stored counterclockwise.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> boundary;
  double h = 0.0;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double triangle_area(std::size_t t) const;
  Vec2 centroid(std::size_t t) const;
  /// Gradients of the three nodal basis functions (constant on the triangle).
  std::array<Vec2, 3> basis_gradients(std::size_t t) const;
  double max_edge_length() const;

  /// Throws ErrorKind::mesh on non-positive areas, non-conforming edges or
  /// boundary flags that disagree with the boundary edges.
  void validate() const;
};

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_angle_deg = 0.0;
  double min_area = 0.0;
  double max_edge = 0.0;
};
MeshQuality mesh_quality(const Mesh& mesh);

/// Element size h * max(d, h^{1/(1-g)})^g with d the distance to `anchor`.
struct Grading {
  Vec2 anchor = Vec2::Zero();
  double exponent = 0.0;
};

/// nx by ny cells, each split along its diagonal.
Mesh structured_rectangle(const Vec2& lo, const Vec2& hi, int nx, int ny);

/// Fan of `sectors` triangles uniformly subdivided `rings` times, rings projected
/// onto circles. Invariant under the dihedral group of order 2 * sectors.
Mesh disk_mesh(double radius, int sectors, int rings);

/// Axis rectangles get the structured split; anything else a quality
/// constrained Delaunay refinement (minimum angle about 20.7 degrees).
Mesh mesh_generate(const PolygonalDomain& domain, double h, const std::optional<Grading>& grading = std::nullopt);

/// Red refinement: every triangle split into four through edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh read_mesh(const std::filesystem::path& path);

/// Bucket grid for point location.
class PointLocator {
public:
  explicit PointLocator(const Mesh& mesh);
  struct Hit {
    std::size_t triangle;
    std::array<double, 3> barycentric;
  };
  /// Triangle containing p (with a small tolerance), if any.
  std::optional<Hit> locate(const Vec2& p) const;

private:
  const Mesh* mesh_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace wplap
