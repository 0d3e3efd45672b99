#pragma once

#include "wplap/geometry.hpp"

#include <array>
#include <functional>
#include <vector>

namespace wplap::detail {

struct RefinedMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> boundary;
};

/// Conforming Delaunay refinement of a polygon: boundary segments are split
/// until none is encroached, then circumcenters of triangles that are too
/// large for `size` or have circumradius / shortest edge above sqrt(2) are
/// inserted.
RefinedMesh refine_polygon(const PolygonalDomain& domain, const std::function<double(const Vec2&)>& size,
                           std::size_t max_vertices = 4'000'000);

}  // namespace wplap::detail
