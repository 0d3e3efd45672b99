#pragma once

#include "wplap/linalg.hpp"

#include "json.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wplap {

enum class WeightFamily { constant, power, rotated_anisotropic, user_supplied };

std::string to_string(WeightFamily family);

/// Matrix-valued weight x -> M(x) on the plane, with the metadata the
/// oscillation and solver code relies on.
///
/// `lambda_bound` is the declared bound on |M(x)| |M(x)^{-1}|. Singular
/// anchors are points where the field degenerates (e.g. the origin of
/// |x|^eps); quadrature nodes are kept away from them.
class MatrixWeightField {
public:
  using Evaluator = std::function<SpdMatrix(const Vec2&)>;

  MatrixWeightField(int dim, double lambda_bound, WeightFamily family, Evaluator eval,
                    std::vector<Vec2> singular_anchors = {}, nlohmann::json params = {});

  int dim() const { return dim_; }
  double lambda_bound() const { return lambda_; }
  WeightFamily family() const { return family_; }
  const std::vector<Vec2>& singular_anchors() const { return anchors_; }
  /// Parameters the field was built from (for report provenance).
  const nlohmann::json& params() const { return params_; }

  SpdMatrix operator()(const Vec2& x) const { return eval_(x); }
  SpdMatrix evaluate(const Vec2& x) const { return eval_(x); }

  /// A(x) = M(x)^2, with bound Lambda^2.
  MatrixWeightField squared() const;
  /// x -> c M(x) for a constant c > 0.
  MatrixWeightField scaled(double c) const;

private:
  int dim_;
  double lambda_;
  WeightFamily family_;
  Evaluator eval_;
  std::vector<Vec2> anchors_;
  nlohmann::json params_;
};

/// Constant field M(x) = m0.
MatrixWeightField constant_field(const SpdMatrix& m0);

/// M(x) = |x - anchor|^exponent * base. The anchor is recorded as singular.
MatrixWeightField power_field(double exponent, const Vec2& anchor = Vec2::Zero(),
                              const SpdMatrix& base = SpdMatrix::identity(2));

/// M(x) = scale * R(theta(x)) diag(1, 1/ratio) R(theta(x))^T with
/// theta(x) = theta0 + rate * x_1. Condition number is `ratio` everywhere.
MatrixWeightField rotated_anisotropic_field(double ratio, double theta0 = 0.0, double rate = 1.0,
                                            double scale = 1.0);

/// Field from an arbitrary closure (tagged user_supplied).
MatrixWeightField custom_field(int dim, double lambda_bound, MatrixWeightField::Evaluator eval,
                               std::vector<Vec2> singular_anchors = {});

/// Rectilinear grid of symmetric 2x2 entries, bilinearly interpolated.
/// Evaluation outside the grid's bounding box throws invalid_input.
class GridWeightTable {
public:
  struct Row {
    double x, y, m11, m12, m22;
  };

  explicit GridWeightTable(const std::vector<Row>& rows);

  SpdMatrix evaluate(const Vec2& p) const;
  /// Largest condition number over the grid nodes.
  double max_condition() const;

private:
  std::vector<double> xs_, ys_;
  std::vector<Mat> nodes_;  // row-major in (iy, ix)
};

/// Parses CSV rows "x, y, m11, m12, m22" (header line optional).
std::vector<GridWeightTable::Row> read_weight_csv(const std::string& path);

MatrixWeightField grid_field(std::shared_ptr<const GridWeightTable> table);

/// Builds a field from a JSON description, e.g.
///   {"family": "power", "exponent": 0.3, "anchor": [0,0], "lambda": 1.0}
///   {"family": "constant", "matrix": [[4,0],[0,1]]}
///   {"family": "rotated_anisotropic", "ratio": 2, "theta0": 0, "rate": 1}
///   {"family": "grid", "csv": "weights.csv"}
/// Relative CSV paths are resolved against `base_dir`.
MatrixWeightField field_from_json(const nlohmann::json& spec, const std::string& base_dir = ".");

/// |M(x)| |M(x)^{-1}| together with the bound check.
struct ConditionCheck {
  double value;
  bool violated;
};

ConditionCheck condition_product(const MatrixWeightField& field, const Vec2& x);

/// omega(x) = |M(x)|.
double scalar_weight(const MatrixWeightField& field, const Vec2& x);

}  // namespace wplap
