#include "wplap/geometry.hpp"

#include "wplap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace wplap {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(), 1e-300});
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) - 1e-15 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-15 &&
         std::min(a.y(), b.y()) - 1e-15 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-15;
}

bool segments_touch(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a), o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a), o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

double signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

Vec2 json_point(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    raise(ErrorKind::config, std::string("domain: ") + what + " must be a [x, y] pair");
  }
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

// Distance from p to every edge except those listed.
double distance_excluding(const std::vector<Vec2>& v, const Vec2& p, std::size_t skip_a, std::size_t skip_b) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip_a || i == skip_b) continue;
    best = std::min(best, point_segment_distance(p, Segment{v[i], v[(i + 1) % n]}));
  }
  return best;
}

}  // namespace

Vec2 BoundaryChart::to_local(const Vec2& x) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  const Vec2 d = x - anchor;
  return Vec2(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
}

Vec2 BoundaryChart::to_global(const Vec2& y) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  return anchor + Vec2(c * y.x() - s * y.y(), s * y.x() + c * y.y());
}

double BoundaryChart::psi(double s) const {
  if (breakpoints.empty()) return 0.0;
  if (breakpoints.size() == 1) return breakpoints.front().second;
  std::size_t k = 0;
  while (k + 2 < breakpoints.size() && s >= breakpoints[k + 1].first) ++k;
  const auto& [x0, y0] = breakpoints[k];
  const auto& [x1, y1] = breakpoints[k + 1];
  return y0 + (y1 - y0) * (s - x0) / (x1 - x0);
}

double BoundaryChart::psi_slope(double s) const {
  if (breakpoints.size() < 2) return 0.0;
  std::size_t k = 0;
  while (k + 2 < breakpoints.size() && s >= breakpoints[k + 1].first) ++k;
  const auto& [x0, y0] = breakpoints[k];
  const auto& [x1, y1] = breakpoints[k + 1];
  return (y1 - y0) / (x1 - x0);
}

double BoundaryChart::max_slope() const {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const auto& [x0, y0] = breakpoints[k];
    const auto& [x1, y1] = breakpoints[k + 1];
    m = std::max(m, std::abs((y1 - y0) / (x1 - x0)));
  }
  return m;
}

Vec2 flatten(const BoundaryChart& chart, const Vec2& local) {
  return Vec2(local.x(), local.y() - chart.psi(local.x()));
}

Vec2 unflatten(const BoundaryChart& chart, const Vec2& flat) {
  return Vec2(flat.x(), flat.y() + chart.psi(flat.x()));
}

Mat flatten_jacobian(const BoundaryChart& chart, const Vec2& local) {
  Mat j(2, 2);
  j << 1.0, 0.0, -chart.psi_slope(local.x()), 1.0;
  return j;
}

double point_segment_distance(const Vec2& p, const Segment& s) {
  const Vec2 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? (p - s.a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (s.a + t * d)).norm();
}

PolygonalDomain::PolygonalDomain(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  validate();
  charts_ = automatic_charts(vertices_);
  charted_.assign(vertices_.size(), true);
  for (const auto& c : charts_) delta_ = std::max(delta_, c.max_slope());
  r_ = std::numeric_limits<double>::infinity();
  for (const auto& c : charts_) r_ = std::min(r_, c.radius);
}

PolygonalDomain::PolygonalDomain(std::vector<Vec2> vertices, std::vector<BoundaryChart> charts,
                                 std::vector<bool> charted_edges, double declared_delta, double declared_r)
    : vertices_(std::move(vertices)), charts_(std::move(charts)), charted_(std::move(charted_edges)),
      delta_(declared_delta), r_(declared_r) {
  if (signed_area(vertices_) < 0.0 && charted_.size() == vertices_.size()) {
    // Keep edge flags attached to the same geometric edges after reversal.
    std::vector<bool> flags(charted_.size());
    const std::size_t n = charted_.size();
    for (std::size_t i = 0; i < n; ++i) flags[(n - 1 - i + n - 1) % n] = charted_[i];
    charted_ = flags;
  }
  validate();
  require(charted_.size() == vertices_.size(), ErrorKind::invalid_input,
          "PolygonalDomain: one charted flag per edge required");
  require(declared_delta >= 0.0 && declared_r > 0.0, ErrorKind::invalid_input,
          "PolygonalDomain: declared delta must be >= 0 and R > 0");
  for (const auto& c : charts_) {
    require(c.radius > 0.0, ErrorKind::invalid_input, "PolygonalDomain: chart radius must be positive");
    for (std::size_t k = 0; k + 1 < c.breakpoints.size(); ++k) {
      require(c.breakpoints[k].first < c.breakpoints[k + 1].first, ErrorKind::invalid_input,
              "PolygonalDomain: chart breakpoints must be strictly increasing");
    }
  }
}

void PolygonalDomain::validate() {
  const std::size_t n = vertices_.size();
  require(n >= 3, ErrorKind::mesh, "polygon needs at least 3 vertices");
  for (const auto& v : vertices_) require(v.allFinite(), ErrorKind::mesh, "polygon vertex is not finite");
  for (std::size_t i = 0; i < n; ++i) {
    require((vertices_[i] - vertices_[(i + 1) % n]).norm() > 0.0, ErrorKind::mesh, "polygon has repeated vertices");
  }
  const double a = signed_area(vertices_);
  require(std::abs(a) > 0.0, ErrorKind::mesh, "polygon is degenerate (zero area)");
  if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Segment s = edge(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Segment t = edge(j);
      if (adjacent) {
        // Adjacent edges may only share their common vertex.
        const Vec2 shared = j == i + 1 ? s.b : s.a;
        const Vec2 far_s = j == i + 1 ? s.a : s.b;
        const Vec2 far_t = j == i + 1 ? t.b : t.a;
        const bool folded = orientation(far_s, shared, far_t) == 0 && (far_s - shared).dot(far_t - shared) > 0.0;
        require(!folded, ErrorKind::mesh, "polygon folds back on itself at vertex");
        continue;
      }
      require(!segments_touch(s, t), ErrorKind::mesh, "polygon is not simple (edges " + std::to_string(i) +
                                                          " and " + std::to_string(j) + " intersect)");
    }
  }
}

Segment PolygonalDomain::edge(std::size_t i) const {
  return Segment{vertices_[i], vertices_[(i + 1) % vertices_.size()]};
}

bool PolygonalDomain::contains(const Vec2& p) const {
  bool in = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

double PolygonalDomain::area() const { return signed_area(vertices_); }

double PolygonalDomain::boundary_distance(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) best = std::min(best, point_segment_distance(p, edge(i)));
  return best;
}

std::pair<Vec2, Vec2> PolygonalDomain::bounding_box() const {
  Vec2 lo = vertices_.front(), hi = vertices_.front();
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

double PolygonalDomain::interior_angle(std::size_t i) const {
  const std::size_t n = vertices_.size();
  const Vec2 d1 = vertices_[i] - vertices_[(i + n - 1) % n];
  const Vec2 d2 = vertices_[(i + 1) % n] - vertices_[i];
  const double turn = std::atan2(cross(d1, d2), d1.dot(d2));
  return std::numbers::pi - turn;
}

bool PolygonalDomain::is_axis_rectangle() const {
  if (vertices_.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const Segment s = edge(i);
    if (s.a.x() != s.b.x() && s.a.y() != s.b.y()) return false;
  }
  return true;
}

nlohmann::json PolygonalDomain::describe() const {
  return nlohmann::json{{"vertices", vertices_.size()},
                        {"charts", charts_.size()},
                        {"area", area()},
                        {"declared_delta", delta_},
                        {"declared_R", r_},
                        {"outside_theory", outside_theory()}};
}

std::vector<BoundaryChart> automatic_charts(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  std::vector<BoundaryChart> charts;
  charts.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = v[(i + n - 1) % n];
    const Vec2& next = v[(i + 1) % n];
    const Vec2 d1 = (v[i] - prev).normalized();
    const Vec2 d2 = (next - v[i]).normalized();
    const Vec2 t = d1 + d2;
    require(t.norm() > 1e-12, ErrorKind::mesh, "polygon has a zero-angle spike");
    BoundaryChart c;
    c.anchor = v[i];
    c.rotation = std::atan2(t.y(), t.x());
    const Vec2 lp = c.to_local(prev), ln = c.to_local(next);
    c.breakpoints = {{lp.x(), lp.y()}, {0.0, 0.0}, {ln.x(), ln.y()}};
    c.radius = std::min({(prev - v[i]).norm(), (next - v[i]).norm(),
                         distance_excluding(v, v[i], (i + n - 1) % n, i)});
    charts.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    const double len = (b - a).norm();
    BoundaryChart c;
    c.anchor = 0.5 * (a + b);
    c.rotation = std::atan2(b.y() - a.y(), b.x() - a.x());
    c.breakpoints = {{-0.5 * len, 0.0}, {0.5 * len, 0.0}};
    c.radius = std::min(0.5 * len, distance_excluding(v, c.anchor, i, i));
    charts.push_back(std::move(c));
  }
  return charts;
}

PolygonalDomain rectangle_domain(const Vec2& lo, const Vec2& hi) {
  require(hi.x() > lo.x() && hi.y() > lo.y(), ErrorKind::mesh, "rectangle: hi must exceed lo");
  return PolygonalDomain({lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())});
}

PolygonalDomain corner_domain(double eps, int chords) {
  require(eps > 0.0 && eps <= 1.0, ErrorKind::domain, "corner_domain: epsilon must lie in (0, 1]");
  require(chords >= 4, ErrorKind::invalid_input, "corner_domain: need at least 4 chords");
  const double theta0 = std::atan(eps);
  const double sweep = std::numbers::pi + 2.0 * theta0;
  const double step = sweep / chords;
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>(chords) + 2);
  v.emplace_back(0.0, 0.0);
  for (int k = 0; k <= chords; ++k) {
    const double a = -theta0 + k * step;
    v.emplace_back(std::cos(a), std::sin(a));
  }
  BoundaryChart origin;
  origin.anchor = Vec2::Zero();
  origin.rotation = 0.0;
  origin.breakpoints = {{-1.0, -eps}, {0.0, 0.0}, {1.0, -eps}};
  origin.radius = 1.0;
  origin.tolerance = 1.0 - std::cos(0.5 * step);
  std::vector<bool> charted(v.size(), false);
  charted.front() = true;  // origin -> right ray end
  charted.back() = true;   // left ray end -> origin
  return PolygonalDomain(std::move(v), {origin}, std::move(charted), eps, 1.0);
}

PolygonalDomain domain_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("type") || !spec["type"].is_string()) {
    raise(ErrorKind::config, "domain: object with a string \"type\" required");
  }
  const std::string type = spec["type"].get<std::string>();
  if (type == "corner") {
    if (!spec.contains("epsilon") || !spec["epsilon"].is_number()) {
      raise(ErrorKind::config, "domain: corner needs numeric \"epsilon\"");
    }
    const int chords = spec.value("chords", 256);
    return corner_domain(spec["epsilon"].get<double>(), chords);
  }
  if (type == "polygon") {
    if (!spec.contains("vertices") || !spec["vertices"].is_array()) {
      raise(ErrorKind::config, "domain: polygon needs a \"vertices\" array");
    }
    std::vector<Vec2> v;
    for (const auto& p : spec["vertices"]) v.push_back(json_point(p, "vertex"));
    return PolygonalDomain(std::move(v));
  }
  if (type == "rectangle") {
    if (!spec.contains("lo") || !spec.contains("hi")) raise(ErrorKind::config, "domain: rectangle needs lo and hi");
    return rectangle_domain(json_point(spec["lo"], "lo"), json_point(spec["hi"], "hi"));
  }
  raise(ErrorKind::config, "domain: unknown type '" + type + "'");
}

double lipschitz_params(const PolygonalDomain& domain, double r) {
  require(r > 0.0, ErrorKind::invalid_input, "lipschitz_params: R must be positive");
  std::vector<const BoundaryChart*> eligible;
  for (const auto& c : domain.charts()) {
    if (c.radius >= r * (1.0 - 1e-12)) eligible.push_back(&c);
  }
  constexpr int samples_per_edge = 64;
  for (std::size_t i = 0; i < domain.num_edges(); ++i) {
    if (!domain.charted_edges()[i]) continue;
    const Segment s = domain.edge(i);
    for (int k = 0; k <= samples_per_edge; ++k) {
      const Vec2 p = s.a + (static_cast<double>(k) / samples_per_edge) * (s.b - s.a);
      const bool covered = std::any_of(eligible.begin(), eligible.end(), [&](const BoundaryChart* c) {
        return (p - c->anchor).norm() <= c->radius * (1.0 + 1e-12) + 1e-14;
      });
      if (!covered) {
        raise(ErrorKind::coverage, "lipschitz_params: edge " + std::to_string(i) + " is not covered by a chart of radius >= " +
                                       std::to_string(r));
      }
    }
  }
  double delta = 0.0;
  for (const auto* c : eligible) delta = std::max(delta, c->max_slope());
  return delta;
}

ChartAudit verify_chart(const PolygonalDomain& domain, const BoundaryChart& chart, std::size_t samples,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ChartAudit audit;
  const double ignore = std::max(chart.tolerance, 1e-12);
  for (std::size_t k = 0; k < samples; ++k) {
    const double rad = chart.radius * (1.0 - 1e-9) * std::sqrt(unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    const Vec2 local(rad * std::cos(ang), rad * std::sin(ang));
    const Vec2 x = chart.to_global(local);
    ++audit.samples;
    if (domain.boundary_distance(x) <= ignore) {
      ++audit.ignored;
      continue;
    }
    const bool above = local.y() > chart.psi(local.x());
    if (above != domain.contains(x)) ++audit.mismatches;
  }
  return audit;
}

double mc_inside_fraction(const PolygonalDomain& domain, const Vec2& center, double r, std::size_t points,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t inside = 0;
  for (std::size_t k = 0; k < points; ++k) {
    const double rad = r * std::sqrt(unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    if (domain.contains(center + Vec2(rad * std::cos(ang), rad * std::sin(ang)))) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(points);
}

nlohmann::json MeasureDensityReport::to_json() const {
  return nlohmann::json{{"sup_ball_over_inside", sup_ball_over_inside},
                        {"inf_outside_fraction", inf_outside_fraction},
                        {"violations_upper", violations_upper},
                        {"violations_lower", violations_lower},
                        {"balls", balls},
                        {"bound_upper", bound_upper},
                        {"bound_lower", bound_lower},
                        {"within_hypotheses", within_hypotheses}};
}

MeasureDensityReport measure_density(const PolygonalDomain& domain, const MeasureDensityConfig& config) {
  require(config.r_min > 0.0 && config.r_max >= config.r_min && config.mc_points > 0, ErrorKind::invalid_input,
          "measure_density: need 0 < r_min <= r_max and mc_points > 0");
  MeasureDensityReport rep;
  rep.within_hypotheses = !domain.outside_theory();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto [lo, hi] = domain.bounding_box();
  auto radius = [&] { return config.r_min * std::pow(config.r_max / config.r_min, unit(rng)); };
  const double n_mc = static_cast<double>(config.mc_points);
  const double p0 = 1.0 / 16.0;
  const double sigma0 = std::sqrt(p0 * (1.0 - p0) / n_mc);

  for (std::size_t b = 0; b < config.interior_balls; ++b) {
    Vec2 y;
    do {
      y = Vec2(lo.x() + (hi.x() - lo.x()) * unit(rng), lo.y() + (hi.y() - lo.y()) * unit(rng));
    } while (!domain.contains(y));
    const double r = radius();
    const double f = mc_inside_fraction(domain, y, r, config.mc_points, rng());
    rep.sup_ball_over_inside = std::max(rep.sup_ball_over_inside, f > 0.0 ? 1.0 / f : std::numeric_limits<double>::infinity());
    if (f < p0 - 3.0 * sigma0) ++rep.violations_upper;
    ++rep.balls;
  }

  std::vector<double> cumulative;
  double total = 0.0;
  for (std::size_t i = 0; i < domain.num_edges(); ++i) {
    const Segment s = domain.edge(i);
    total += (s.b - s.a).norm();
    cumulative.push_back(total);
  }
  for (std::size_t b = 0; b < config.boundary_balls; ++b) {
    const double t = total * unit(rng);
    const std::size_t i = std::min<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), t) - cumulative.begin(), domain.num_edges() - 1);
    const Segment s = domain.edge(i);
    const double start = i == 0 ? 0.0 : cumulative[i - 1];
    const double len = (s.b - s.a).norm();
    const Vec2 y = s.a + std::clamp((t - start) / len, 0.0, 1.0) * (s.b - s.a);
    const double r = radius();
    const double g = 1.0 - mc_inside_fraction(domain, y, r, config.mc_points, rng());
    rep.inf_outside_fraction = std::min(rep.inf_outside_fraction, g);
    if (g < p0 - 3.0 * sigma0) ++rep.violations_lower;
    ++rep.balls;
  }
  return rep;
}

}  // namespace wplap
