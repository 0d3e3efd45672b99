#include "wplap/ball_quadrature.hpp"

#include "wplap/error.hpp"

#include <cmath>
#include <numbers>

namespace wplap {

Ball::Ball(const Vec2& c, double r) : center(c), radius(r) {
  require(r > 0.0 && std::isfinite(r), ErrorKind::invalid_input, "Ball: radius must be positive");
  require(c.allFinite(), ErrorKind::invalid_input, "Ball: center must be finite");
}

double Ball::area() const { return std::numbers::pi * radius * radius; }

BallNodes ball_nodes(const Ball& ball, const QuadratureSpec& spec, const std::vector<Vec2>& anchors,
                     const Region& region) {
  require(spec.cells >= 2 && spec.subsamples >= 1, ErrorKind::invalid_input,
          "QuadratureSpec: need cells >= 2 and subsamples >= 1");
  BallNodes out{ball, {}, {}, 0.0, false, 0};
  const int n = spec.cells;
  const double h = 2.0 * ball.radius / n;
  const double x0 = ball.center.x() - ball.radius;
  const double y0 = ball.center.y() - ball.radius;
  auto inside = [&](const Vec2& p) { return ball.contains(p) && (!region || region(p)); };

  // Corner membership computed once per grid vertex.
  std::vector<char> corner((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) corner[j * (n + 1) + i] = inside(Vec2(x0 + i * h, y0 + j * h)) ? 1 : 0;

  const int s = spec.subsamples;
  out.points.reserve(static_cast<std::size_t>(n) * n);
  out.weights.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int c00 = corner[j * (n + 1) + i], c10 = corner[j * (n + 1) + i + 1];
      const int c01 = corner[(j + 1) * (n + 1) + i], c11 = corner[(j + 1) * (n + 1) + i + 1];
      const Vec2 mid(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h);
      Vec2 node = mid;
      double w = h * h;
      if (c00 + c10 + c01 + c11 != 4) {
        // Cut cell: count covered subsamples.
        int count = 0;
        Vec2 sum = Vec2::Zero();
        for (int b = 0; b < s; ++b) {
          for (int a = 0; a < s; ++a) {
            const Vec2 q(x0 + (i + (a + 0.5) / s) * h, y0 + (j + (b + 0.5) / s) * h);
            if (inside(q)) {
              ++count;
              sum += q;
            }
          }
        }
        if (count == 0) continue;
        w = h * h * count / (s * s);
        if (!inside(mid)) node = sum / count;
      }
      bool near_anchor = false;
      for (const auto& a : anchors) {
        if ((node - a).norm() < spec.anchor_separation) near_anchor = true;
      }
      if (near_anchor) {
        ++out.dropped_near_anchor;
        continue;
      }
      out.points.push_back(node);
      out.weights.push_back(w);
      out.total_weight += w;
    }
  }
  if (region) {
    out.clipped = out.total_weight < ball.area() * (1.0 - 1e-3);
  }
  if (out.points.empty() || !(out.total_weight > 0.0)) {
    raise(ErrorKind::degenerate_quadrature, "ball quadrature has no usable nodes");
  }
  return out;
}

// Means are accumulated as offsets from the first value, so a constant
// integrand gives its value back exactly and its oscillation is exactly 0.
double node_mean(const BallNodes& nodes, const std::vector<double>& values) {
  const double ref = values.front();
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += nodes.weights[k] * (values[k] - ref);
  return ref + s / nodes.total_weight;
}

Mat node_mean(const BallNodes& nodes, const std::vector<Mat>& values) {
  const Mat& ref = values.front();
  Mat s = Mat::Zero(ref.rows(), ref.cols());
  for (std::size_t k = 0; k < values.size(); ++k) s += nodes.weights[k] * (values[k] - ref);
  return ref + s / nodes.total_weight;
}

SpdMatrix log_mean(const MatrixWeightField& field, const BallNodes& nodes) {
  Mat s = Mat::Zero(field.dim(), field.dim());
  for (std::size_t k = 0; k < nodes.size(); ++k) s += nodes.weights[k] * matrix_log(field(nodes.points[k]));
  return matrix_exp(s / nodes.total_weight);
}

double log_mean(const ScalarWeight& weight, const BallNodes& nodes) {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double w = weight(nodes.points[k]);
    require(w > 0.0 && std::isfinite(w), ErrorKind::invalid_input, "log_mean: weight must be positive");
    s += nodes.weights[k] * std::log(w);
  }
  return std::exp(s / nodes.total_weight);
}

SpdMatrix log_mean(const MatrixWeightField& field, const Ball& ball, const QuadratureSpec& spec,
                   const Region& region) {
  return log_mean(field, ball_nodes(ball, spec, field.singular_anchors(), region));
}

double log_mean(const ScalarWeight& weight, const Ball& ball, const QuadratureSpec& spec,
                const std::vector<Vec2>& anchors, const Region& region) {
  return log_mean(weight, ball_nodes(ball, spec, anchors, region));
}

ScalarWeight scalar_weight_of(const MatrixWeightField& field) {
  return [field](const Vec2& x) { return spectral_norm(field(x)); };
}

}  // namespace wplap
