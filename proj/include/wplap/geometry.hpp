#pragma once

#include "wplap/linalg.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace wplap {

/// Local boundary chart: in the rotated frame centered at `anchor`
/// (tangent e1 = (cos a, sin a), normal e2 = (-sin a, cos a)) the domain is
/// {x_2 > psi(x_1)} inside the ball of radius `radius`. psi is piecewise
/// linear through `breakpoints` and extended linearly past the ends.
struct BoundaryChart {
  Vec2 anchor;
  double rotation = 0.0;
  std::vector<std::pair<double, double>> breakpoints;
  double radius = 0.0;
  /// Sampling checks of the chart ignore points this close to the polygon
  /// boundary (chord approximation of curved pieces).
  double tolerance = 0.0;

  Vec2 to_local(const Vec2& x) const;
  Vec2 to_global(const Vec2& y) const;
  double psi(double s) const;
  /// Right derivative of psi.
  double psi_slope(double s) const;
  /// ||psi'||_inf, exact for piecewise-linear psi.
  double max_slope() const;
};

/// Flattening map in chart coordinates: (x', x_n) -> (x', x_n - psi(x')).
Vec2 flatten(const BoundaryChart& chart, const Vec2& local);
Vec2 unflatten(const BoundaryChart& chart, const Vec2& flat);
/// Jacobian [[1, 0], [-psi'(x'), 1]]; determinant is 1.
Mat flatten_jacobian(const BoundaryChart& chart, const Vec2& local);

struct Segment {
  Vec2 a;
  Vec2 b;
};

double point_segment_distance(const Vec2& p, const Segment& s);

/// Simple polygon (stored counterclockwise) with boundary charts and the
/// declared Lipschitz parameters.
class PolygonalDomain {
public:
  /// Validates simplicity; clockwise input is reversed. Without charts,
  /// one chart per vertex and per edge midpoint is constructed and every
  /// edge is marked as charted.
  explicit PolygonalDomain(std::vector<Vec2> vertices);
  PolygonalDomain(std::vector<Vec2> vertices, std::vector<BoundaryChart> charts, std::vector<bool> charted_edges,
                  double declared_delta, double declared_r);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<BoundaryChart>& charts() const { return charts_; }
  const std::vector<bool>& charted_edges() const { return charted_; }
  std::size_t num_edges() const { return vertices_.size(); }
  Segment edge(std::size_t i) const;
  double declared_delta() const { return delta_; }
  double declared_r() const { return r_; }
  /// Run tag: true when the declared delta exceeds 1/(2n) = 1/4.
  bool outside_theory() const { return delta_ > 0.25; }

  bool contains(const Vec2& p) const;
  double area() const;
  double boundary_distance(const Vec2& p) const;
  std::pair<Vec2, Vec2> bounding_box() const;
  /// Interior angle at vertex i, in (0, 2 pi).
  double interior_angle(std::size_t i) const;
  bool is_axis_rectangle() const;

  nlohmann::json describe() const;

private:
  void validate();

  std::vector<Vec2> vertices_;
  std::vector<BoundaryChart> charts_;
  std::vector<bool> charted_;
  double delta_ = 0.0;
  double r_ = 0.0;
};

/// One chart per vertex (bisector frame) and per edge midpoint.
std::vector<BoundaryChart> automatic_charts(const std::vector<Vec2>& ccw_vertices);

PolygonalDomain rectangle_domain(const Vec2& lo, const Vec2& hi);

/// Polygonal approximation of {x in B_1(0) : x_2 > -eps |x_1|}: exact corner at
/// the origin, the arc replaced by `chords` inscribed chords. eps in (0, 1].
/// The chart at the origin (psi = -eps |x_1|, radius 1) certifies both rays.
PolygonalDomain corner_domain(double eps, int chords = 256);

/// Domain from JSON: {"type": "corner", "epsilon": 1.0, "chords": 256},
/// {"type": "polygon", "vertices": [[x,y],...]}, {"type": "rectangle", "lo": [..], "hi": [..]}.
PolygonalDomain domain_from_json(const nlohmann::json& spec);

/// max over charts with radius >= R of ||psi'||_inf. Throws coverage when a
/// point of a charted edge lies in no such chart's closed ball.
double lipschitz_params(const PolygonalDomain& domain, double r);

struct ChartAudit {
  std::size_t samples = 0;
  std::size_t mismatches = 0;
  std::size_t ignored = 0;
};
/// Checks Omega cap B = {x_n > psi(x')} on seeded points of the chart ball.
ChartAudit verify_chart(const PolygonalDomain& domain, const BoundaryChart& chart, std::size_t samples,
                        std::uint64_t seed);

struct MeasureDensityConfig {
  std::size_t interior_balls = 5000;
  std::size_t boundary_balls = 5000;
  double r_min = 1e-3;
  double r_max = 1.0;
  std::size_t mc_points = 256;
  std::uint64_t seed = 0;
};

struct MeasureDensityReport {
  double sup_ball_over_inside = 0.0;    ///< sup |B| / |Omega cap B| (centers in Omega)
  double inf_outside_fraction = 1.0;    ///< inf |B \ Omega| / |B| (centers on the boundary)
  std::size_t violations_upper = 0;     ///< balls with fraction below 4^{-n} beyond 3 sigma
  std::size_t violations_lower = 0;
  std::size_t balls = 0;
  double bound_upper = 16.0;
  double bound_lower = 1.0 / 16.0;
  bool within_hypotheses = true;        ///< declared delta <= 1/(2n)

  nlohmann::json to_json() const;
};

/// Monte-Carlo estimate of the fraction of B_r(y) inside the domain.
double mc_inside_fraction(const PolygonalDomain& domain, const Vec2& center, double r, std::size_t points,
                          std::uint64_t seed);

MeasureDensityReport measure_density(const PolygonalDomain& domain, const MeasureDensityConfig& config);

}  // namespace wplap
