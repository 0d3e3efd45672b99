#pragma once

#include "wplap/linalg.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace wplap {

/// u = cos(alpha (phi - pi/2)) r^alpha on {x in B_1 : x_2 > -eps |x_1|}, the
/// polar angle taken in (-pi/2, 3pi/2). Harmonic, zero on both rays.
class CornerSolution {
public:
  explicit CornerSolution(double eps);

  double epsilon() const { return eps_; }
  double alpha() const { return alpha_; }
  /// The rays sit at phi = -arctan eps and phi = pi + arctan eps.
  double ray_angle() const { return theta0_; }
  /// Analytic threshold 2 + pi / arctan eps.
  double critical_q() const;

  static double polar_angle(const Vec2& x);
  bool in_sector(const Vec2& x) const;
  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  /// alpha r^{alpha - 1}
  double gradient_norm(double r) const;

private:
  double eps_;
  double theta0_;
  double alpha_;
};

/// eps in (0, 1]; domain error otherwise.
CornerSolution corner_exact(double eps);

/// int over {r0 < r < r1} of the sector of |grad u|^q, by Gauss-Legendre in r
/// on dyadic pieces and in the angle.
double corner_gradient_power_integral(const CornerSolution& u, double q, double r0, double r1);

struct AnnulusRow {
  double q;
  int k;
  double norm;  ///< ||grad u||_{L^q} over 2^{-k} < r < 1
};

struct QClassification {
  double q;
  bool divergent;
  /// Smallest of the last three relative increments of the integral, minus the threshold.
  double score;
};

struct ThresholdFit {
  double epsilon = 0.0;
  double q_star_analytic = 0.0;
  double q_hat = 0.0;
  bool inconclusive = false;
  std::vector<AnnulusRow> rows;
  std::vector<QClassification> classes;

  nlohmann::json to_json() const;
  /// epsilon,q,annulus_k,norm,classification
  std::string to_csv() const;
};

struct ThresholdConfig {
  int k_min = 4;
  int k_max = 12;
  double threshold = 0.10;
};

/// Classifies each q by the growth of the annulus integrals and interpolates
/// the crossover between the last convergent and first divergent q.
ThresholdFit threshold_fit(double eps, const std::vector<double>& q_grid, const ThresholdConfig& config = {});

/// Evenly spaced q values from 3 to 2 + 2 pi / arctan eps.
std::vector<double> default_q_grid(double eps, int count = 40);

struct OriginFit {
  double slope = 0.0;
  double r_squared = 0.0;
};
/// Least squares y = slope x; r_squared = 1 - SS_res / sum y^2.
OriginFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wplap
