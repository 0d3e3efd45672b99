#pragma once

#include "wplap/linalg.hpp"
#include "wplap/weight_field.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace wplap {

struct Ball {
  Vec2 center;
  double radius;

  Ball(const Vec2& c, double r);
  bool contains(const Vec2& x) const { return (x - center).squaredNorm() < radius * radius; }
  double area() const;
};

/// Membership predicate of a planar region (e.g. a domain), used for clipping.
using Region = std::function<bool(const Vec2&)>;

/// Tensor midpoint rule on a cells x cells grid covering the ball's bounding
/// square. Cells cut by the ball (or region) boundary get their weight from a
/// subsamples x subsamples count of the covered fraction.
struct QuadratureSpec {
  int cells = 64;
  int subsamples = 8;
  double anchor_separation = 1e-12;
};

/// Quadrature nodes of one ball, possibly clipped against a region.
/// Weights are absolute areas; `points` and `weights` have equal length.
struct BallNodes {
  Ball ball;
  std::vector<Vec2> points;
  std::vector<double> weights;
  double total_weight = 0.0;
  bool clipped = false;
  int dropped_near_anchor = 0;

  std::size_t size() const { return points.size(); }
};

/// Throws degenerate_quadrature when no usable node remains.
BallNodes ball_nodes(const Ball& ball, const QuadratureSpec& spec,
                     const std::vector<Vec2>& anchors = {}, const Region& region = {});

using ScalarWeight = std::function<double(const Vec2&)>;

/// Weighted average of per-node values.
double node_mean(const BallNodes& nodes, const std::vector<double>& values);
Mat node_mean(const BallNodes& nodes, const std::vector<Mat>& values);

/// exp of the quadrature mean of log M over the ball.
SpdMatrix log_mean(const MatrixWeightField& field, const BallNodes& nodes);
/// exp of the quadrature mean of log w over the ball.
double log_mean(const ScalarWeight& weight, const BallNodes& nodes);

SpdMatrix log_mean(const MatrixWeightField& field, const Ball& ball, const QuadratureSpec& spec = {},
                   const Region& region = {});
double log_mean(const ScalarWeight& weight, const Ball& ball, const QuadratureSpec& spec = {},
                const std::vector<Vec2>& anchors = {}, const Region& region = {});

/// omega = |M| as a scalar weight.
ScalarWeight scalar_weight_of(const MatrixWeightField& field);

}  // namespace wplap
