#pragma once

#include "wplap/error.hpp"
#include "wplap/mesh.hpp"
#include "wplap/weight_field.hpp"

#include <Eigen/Core>

#include "json.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace wplap {

using MeshPtr = std::shared_ptr<const Mesh>;

/// Nodal P1 field.
struct DiscreteScalarField {
  MeshPtr mesh;
  Eigen::VectorXd values;
  bool zero_on_boundary = true;

  void validate() const;
};

/// Element-wise constant vector field.
struct DiscreteVectorField {
  MeshPtr mesh;
  std::vector<Vec2> values;

  void validate() const;
};

DiscreteScalarField interpolate(const MeshPtr& mesh, const std::function<double(const Vec2&)>& f,
                                bool zero_on_boundary);
DiscreteVectorField gradient(const DiscreteScalarField& u);
/// Values at element centroids.
DiscreteVectorField sample_at_centroids(const MeshPtr& mesh, const std::function<Vec2(const Vec2&)>& f);

struct WeightClamp {
  double lower = 0.0;
  double upper = 0.0;
};

struct SolveConfig {
  double p = 2.0;
  double tolerance = 1e-10;
  int max_iterations = 100;
  std::vector<double> ladder{1e-2, 1e-4, 1e-6, 0.0};
  /// Eigenvalues of M are clipped to [lower, upper] when set.
  std::optional<WeightClamp> clamp;
  bool line_search = true;

  /// Throws config on p <= 1, non-positive tolerances or a non-decreasing ladder.
  void validate() const;
  static SolveConfig from_json(const nlohmann::json& j);
};

struct RungReport {
  double delta = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct SolveReport {
  double p = 2.0;
  std::vector<RungReport> rungs;
  double final_residual = 0.0;
  double energy = 0.0;
  std::vector<double> energy_history;
  bool clamped = false;
  std::size_t unknowns = 0;

  nlohmann::json to_json() const;
};

class SolveFailure : public Error {
public:
  SolveFailure(ErrorKind kind, const std::string& what, SolveReport report)
      : Error(kind, what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

private:
  SolveReport report_;
};

/// Galerkin solution of int A grad u . grad phi = int A F . grad phi with zero
/// boundary values; A sampled once per element at the centroid.
DiscreteScalarField solve_linear(const MeshPtr& mesh, const MatrixWeightField& a, const DiscreteVectorField& f);

/// Minimizes (1/p) int |M grad v|^p - int |MF|^{p-2} MF . M grad v over zero
/// boundary P1 fields by regularized Newton descending the ladder.
/// Throws SolveFailure (convergence or stall) carrying the report.
std::pair<DiscreteScalarField, SolveReport> solve_plaplace(const MeshPtr& mesh, const MatrixWeightField& m,
                                                           const DiscreteVectorField& f, const SolveConfig& config);

/// Unregularized discrete energy of v.
double plaplace_energy(const DiscreteScalarField& v, const MatrixWeightField& m, const DiscreteVectorField& f,
                       double p);

/// Relative l2 norm of the unregularized weak-form residual at the free nodes.
double weak_residual(const DiscreteScalarField& u, const MatrixWeightField& m, const DiscreteVectorField& f,
                     double p);

struct EnergyRatio {
  double value = 0.0;
  bool zero_datum = false;
};

/// int |grad u|^p omega^p / int |F|^p omega^p with omega = |M| at centroids.
EnergyRatio energy_ratio(const DiscreteScalarField& u, const DiscreteVectorField& f, const MatrixWeightField& m,
                         double p);

/// ||grad u_h - grad u*||_{L^2} with the edge-midpoint rule.
double h1_seminorm_error(const DiscreteScalarField& u, const std::function<Vec2(const Vec2&)>& exact_gradient);

}  // namespace wplap
