#pragma once

#include "wplap/ball_quadrature.hpp"
#include "wplap/geometry.hpp"
#include "wplap/solver.hpp"

#include <functional>
#include <vector>

namespace wplap {

/// Cell-centered values on a uniform grid. Cells outside the domain hold 0.
/// With zero extension (the default) the function is extended by zeros
/// beyond the box; without it, disk averages only see the part of the disk
/// inside the box.
class GridFunction {
public:
  GridFunction(const Vec2& lo, double spacing, int nx, int ny);

  /// Grid of the given spacing over the domain's bounding box (padded by
  /// `pad` cells), f sampled at cell centers inside the domain.
  static GridFunction over_domain(const PolygonalDomain& domain, double spacing,
                                  const std::function<double(const Vec2&)>& f, int pad = 0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double spacing() const { return h_; }
  double cell_area() const { return h_ * h_; }
  const Vec2& lo() const { return lo_; }
  Vec2 center(int i, int j) const { return lo_ + h_ * Vec2(i + 0.5, j + 0.5); }
  double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * nx_ + i]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * nx_ + i]; }
  bool inside(int i, int j) const { return inside_[static_cast<std::size_t>(j) * nx_ + i] != 0; }
  void set_inside(int i, int j, bool in) { inside_[static_cast<std::size_t>(j) * nx_ + i] = in ? 1 : 0; }
  bool zero_extension() const { return zero_extension_; }
  void set_zero_extension(bool on) { zero_extension_ = on; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  GridFunction& operator*=(double c);
  GridFunction& operator+=(double c);
  GridFunction& operator+=(const GridFunction& other);
  GridFunction same_shape() const;

private:
  Vec2 lo_;
  double h_;
  int nx_, ny_;
  std::vector<double> values_;
  std::vector<char> inside_;
  bool zero_extension_ = true;
};

/// Radii h/2 * 2^k, from a single cell up to the box diameter.
std::vector<double> dyadic_radii(const GridFunction& f);

/// sup over dyadic radii of (mean over B_r(x) of |f|^rho)^{1/rho}.
GridFunction maximal(const GridFunction& f, double rho, int threads = 1);
/// sup over dyadic radii of (mean over B_r(x) of |f - <f>_B|^rho)^{1/rho}.
GridFunction sharp_maximal(const GridFunction& f, double rho, int threads = 1);

/// (sum |f|^q cell)^{1/q} over the grid.
double lq_norm(const GridFunction& f, double q);

struct FeffermanSteinResult {
  double ratio = 0.0;
  double norm_f = 0.0;
  double norm_sharp = 0.0;
  bool degenerate = false;
};
/// ||f||_q / (q ||M#_1 f||_q).
FeffermanSteinResult fefferman_stein_ratio(const GridFunction& f, double q, int threads = 1);

using ScalarFn = std::function<double(const Vec2&)>;

/// (sum |field|^q omega^q |T|)^{1/q} over elements whose centroid lies in region.
double weighted_lq_norm(const DiscreteVectorField& field, const ScalarFn& omega, double q,
                        const Region& region = {});
double weighted_lq_norm(const GridFunction& f, const ScalarFn& omega, double q, const Region& region = {});

/// omega = |M| as a scalar function.
ScalarFn weight_norm_fn(const MatrixWeightField& m);

struct CzRatio {
  double value = 0.0;
  bool zero_datum = false;
};
/// ||grad u omega||_q / ||F omega||_q. Throws inconsistency when the datum
/// norm vanishes but u does not.
CzRatio cz_ratio(const DiscreteScalarField& u, const DiscreteVectorField& f, const ScalarFn& omega, double q);

/// Nodal field sampled at grid cell centers by barycentric interpolation;
/// cells outside the mesh get 0.
GridFunction resample(const DiscreteScalarField& u, const GridFunction& shape);
/// |element vector| at grid cell centers; cells outside the mesh get 0.
GridFunction resample_magnitude(const DiscreteVectorField& f, const GridFunction& shape);

}  // namespace wplap
