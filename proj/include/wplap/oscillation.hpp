#pragma once

#include "wplap/ball_quadrature.hpp"
#include "wplap/error.hpp"
#include "wplap/weight_field.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wplap {

/// Generates the balls over which sup-type seminorms are estimated.
/// Radii are dyadic, R, R/2, ..., R/2^levels; centers are a grid over the
/// box plus seeded uniform points. Generation is deterministic given the seed.
class BallSampler {
public:
  struct Config {
    Vec2 lo{-1.0, -1.0};
    Vec2 hi{1.0, 1.0};
    double max_radius = 1.0;
    int levels = 6;
    int grid = 17;
    int random_count = 256;
    std::uint64_t seed = 0;
    /// Optional: centers outside the region are discarded.
    Region region;
  };

  explicit BallSampler(Config config);
  /// Explicit ball list; max_radius is the largest radius given.
  static BallSampler from_balls(std::vector<Ball> balls, std::uint64_t seed = 0);

  const std::vector<Ball>& balls() const { return balls_; }
  double max_radius() const { return max_radius_; }
  std::uint64_t seed() const { return seed_; }
  nlohmann::json provenance() const { return provenance_; }

private:
  BallSampler() = default;

  std::vector<Ball> balls_;
  double max_radius_ = 0.0;
  std::uint64_t seed_ = 0;
  nlohmann::json provenance_;
};

struct BallValue {
  Ball ball;
  double value;
  bool clipped;
};

/// Per-ball values of one quantity plus the running maximum over the
/// ordered ball list. The maximum is a lower bound for the true supremum.
struct OscillationReport {
  std::string quantity;
  std::vector<BallValue> rows;
  double sup = 0.0;
  nlohmann::json provenance;

  void finalize();
  nlohmann::json to_json() const;
  /// "quantity,sup_estimate,ball_count,seed"
  static std::string csv_header();
  std::string csv_row() const;
};

struct OscillationOptions {
  QuadratureSpec quad;
  /// When set, means are taken over B intersected with the region.
  Region clip;
  int threads = 1;
};

class OverflowError : public Error {
public:
  OverflowError(const Ball& ball, const std::string& what) : Error(ErrorKind::overflow, what), ball_(ball) {}
  const Ball& ball() const { return ball_; }

private:
  Ball ball_;
};

// Per-ball quantities on shared nodes.
double log_oscillation(const MatrixWeightField& field, const BallNodes& nodes);
double log_oscillation(const ScalarWeight& weight, const BallNodes& nodes);
/// (mean w^p)^{1/p} (mean w^{-p'})^{1/p'}
double muckenhoupt_bracket(const ScalarWeight& weight, double p, const BallNodes& nodes);

struct CmpValues {
  double bmo2_mu;  ///< (1/mu(B) int |A - <A>|^2 mu^{-1})^{1/2}
  double bmo_mu;   ///< 1/mu(B) int |A - <A>|
};
CmpValues cmp_on_ball(const MatrixWeightField& a_field, const BallNodes& nodes);

/// Conjugate exponent p/(p-1), evaluated in extended precision; requires p >= 1 + 1e-6.
double conjugate_exponent(double p);

OscillationReport bmo_seminorm(const MatrixWeightField& field, const BallSampler& sampler,
                               const OscillationOptions& opts = {});
OscillationReport bmo_seminorm(const ScalarWeight& weight, const std::vector<Vec2>& anchors,
                               const BallSampler& sampler, const OscillationOptions& opts = {});

OscillationReport muckenhoupt_constant(const ScalarWeight& weight, const std::vector<Vec2>& anchors,
                                       double p, const BallSampler& sampler,
                                       const OscillationOptions& opts = {});

struct CmpReports {
  OscillationReport bmo2_mu;
  OscillationReport bmo_mu;
};

/// The two weighted-BMO quantities of A. `a_field` holds A itself.
CmpReports cmp_quantities(const MatrixWeightField& a_field, const BallSampler& sampler,
                          const OscillationOptions& opts = {});

struct LogWeakestVerdict {
  double lhs;            ///< mean |log A - <log A>|
  double rhs;            ///< 4 <|A|> <|A^{-1}|> bmo2_mu
  double margin;         ///< rhs - lhs
  double mean_norm_a;
  double mean_norm_a_inv;
  double bmo2_mu;
  bool holds;            ///< lhs <= rhs + slack
};

LogWeakestVerdict check_log_weakest(const MatrixWeightField& a_field, const Ball& ball,
                                    const QuadratureSpec& quad = {}, const Region& clip = {},
                                    double slack = 1e-8);

struct LinearControlRecord {
  double bmo2_mu;
  double log_bmo;
  std::optional<double> ratio;  ///< empty for the exact-zero case
  bool smallness_met;           ///< log_bmo <= delta
};

LinearControlRecord check_linear_control(const MatrixWeightField& a_field, const Ball& ball, double delta,
                                         const QuadratureSpec& quad = {}, const Region& clip = {});

struct VanishingResult {
  bool vanishing;
  OscillationReport report;
};

/// True iff the sampled sup of the log oscillation is <= delta. This is only
/// a necessary condition: unsampled balls may oscillate more.
VanishingResult vanishing_check(const MatrixWeightField& field, double delta, const BallSampler& sampler,
                                const OscillationOptions& opts = {});

/// (mean (|M - <M>^log| / |<M>^log|)^t)^{1/t} on one ball.
double log_mean_deviation(const MatrixWeightField& field, double t, const BallNodes& nodes);

/// Diagnostic: per ball, t-mean deviation divided by t * log oscillation.
OscillationReport john_nirenberg_report(const MatrixWeightField& field, double t, const BallSampler& sampler,
                                        const OscillationOptions& opts = {});

}  // namespace wplap
