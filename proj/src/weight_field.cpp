#include "wplap/weight_field.hpp"

#include "wplap/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wplap {

std::string to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::constant: return "constant";
    case WeightFamily::power: return "power";
    case WeightFamily::rotated_anisotropic: return "rotated_anisotropic";
    case WeightFamily::user_supplied: return "user_supplied";
  }
  return "unknown";
}

MatrixWeightField::MatrixWeightField(int dim, double lambda_bound, WeightFamily family,
                                     Evaluator eval, std::vector<Vec2> singular_anchors,
                                     nlohmann::json params)
    : dim_(dim),
      lambda_(lambda_bound),
      family_(family),
      eval_(std::move(eval)),
      anchors_(std::move(singular_anchors)),
      params_(std::move(params)) {
  require(dim_ >= 2 && dim_ <= 3, ErrorKind::invalid_input, "MatrixWeightField: dim must be 2 or 3");
  require(lambda_ >= 1.0 && std::isfinite(lambda_), ErrorKind::invalid_input,
          "MatrixWeightField: lambda bound must be >= 1");
  require(static_cast<bool>(eval_), ErrorKind::invalid_input, "MatrixWeightField: empty evaluator");
}

MatrixWeightField MatrixWeightField::squared() const {
  auto inner = eval_;
  nlohmann::json p = params_;
  p["squared"] = true;
  return MatrixWeightField(dim_, lambda_ * lambda_, family_,
                           [inner](const Vec2& x) { return inner(x).squared(); }, anchors_, p);
}

MatrixWeightField MatrixWeightField::scaled(double c) const {
  require(c > 0.0, ErrorKind::invalid_input, "MatrixWeightField::scaled: factor must be positive");
  auto inner = eval_;
  nlohmann::json p = params_;
  p["scale_factor"] = c;
  return MatrixWeightField(dim_, lambda_, family_,
                           [inner, c](const Vec2& x) { return inner(x).scaled(c); }, anchors_, p);
}

namespace {

double condition_of(const SpdMatrix& m) { return m.max_eigenvalue() / m.min_eigenvalue(); }

}  // namespace

MatrixWeightField constant_field(const SpdMatrix& m0) {
  nlohmann::json p = {{"family", "constant"}};
  return MatrixWeightField(m0.dim(), condition_of(m0), WeightFamily::constant,
                           [m0](const Vec2&) { return m0; }, {}, p);
}

MatrixWeightField power_field(double exponent, const Vec2& anchor, const SpdMatrix& base) {
  require(std::isfinite(exponent), ErrorKind::invalid_input, "power_field: exponent must be finite");
  nlohmann::json p = {{"family", "power"}, {"exponent", exponent}, {"anchor", {anchor.x(), anchor.y()}}};
  return MatrixWeightField(
      base.dim(), condition_of(base), WeightFamily::power,
      [exponent, anchor, base](const Vec2& x) {
        const double r = (x - anchor).norm();
        if (!(r > 0.0)) {
          raise(ErrorKind::invalid_input, "power_field: evaluated at the singular anchor");
        }
        return base.scaled(std::pow(r, exponent));
      },
      {anchor}, p);
}

MatrixWeightField rotated_anisotropic_field(double ratio, double theta0, double rate, double scale) {
  require(ratio >= 1.0, ErrorKind::invalid_input, "rotated_anisotropic_field: ratio must be >= 1");
  require(scale > 0.0, ErrorKind::invalid_input, "rotated_anisotropic_field: scale must be positive");
  nlohmann::json p = {{"family", "rotated_anisotropic"}, {"ratio", ratio}, {"theta0", theta0},
                      {"rate", rate}, {"scale", scale}};
  return MatrixWeightField(
      2, ratio, WeightFamily::rotated_anisotropic,
      [ratio, theta0, rate, scale](const Vec2& x) {
        const double th = theta0 + rate * x.x();
        Mat rot(2, 2);
        rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        Mat d = Mat::Zero(2, 2);
        d(0, 0) = scale;
        d(1, 1) = scale / ratio;
        const Mat m = rot * d * rot.transpose();
        return SpdMatrix(0.5 * (m + m.transpose()));
      },
      {}, p);
}

MatrixWeightField custom_field(int dim, double lambda_bound, MatrixWeightField::Evaluator eval,
                               std::vector<Vec2> singular_anchors) {
  return MatrixWeightField(dim, lambda_bound, WeightFamily::user_supplied, std::move(eval),
                           std::move(singular_anchors), {{"family", "custom"}});
}

GridWeightTable::GridWeightTable(const std::vector<Row>& rows) {
  require(!rows.empty(), ErrorKind::invalid_input, "GridWeightTable: no rows");
  for (const auto& r : rows) {
    xs_.push_back(r.x);
    ys_.push_back(r.y);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(xs_);
  uniq(ys_);
  require(xs_.size() >= 2 && ys_.size() >= 2, ErrorKind::invalid_input,
          "GridWeightTable: need at least a 2x2 grid");
  require(xs_.size() * ys_.size() == rows.size(), ErrorKind::invalid_input,
          "GridWeightTable: rows do not form a complete rectilinear grid");
  nodes_.assign(rows.size(), Mat());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& r : rows) {
    const auto ix = std::lower_bound(xs_.begin(), xs_.end(), r.x) - xs_.begin();
    const auto iy = std::lower_bound(ys_.begin(), ys_.end(), r.y) - ys_.begin();
    const std::size_t k = static_cast<std::size_t>(iy) * xs_.size() + static_cast<std::size_t>(ix);
    require(!seen[k], ErrorKind::invalid_input, "GridWeightTable: duplicate grid node");
    seen[k] = true;
    Mat m(2, 2);
    m << r.m11, r.m12, r.m12, r.m22;
    SpdMatrix check(m);  // validates positivity at the nodes
    nodes_[k] = check.mat();
  }
}

SpdMatrix GridWeightTable::evaluate(const Vec2& p) const {
  if (p.x() < xs_.front() || p.x() > xs_.back() || p.y() < ys_.front() || p.y() > ys_.back()) {
    raise(ErrorKind::invalid_input, "GridWeightTable: point outside the grid");
  }
  auto locate = [](const std::vector<double>& v, double t) {
    auto it = std::upper_bound(v.begin(), v.end(), t);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - v.begin())) - 1;
    i = std::min(i, v.size() - 2);
    const double s = (t - v[i]) / (v[i + 1] - v[i]);
    return std::pair{i, s};
  };
  const auto [ix, sx] = locate(xs_, p.x());
  const auto [iy, sy] = locate(ys_, p.y());
  const std::size_t nx = xs_.size();
  const Mat m = (1 - sx) * (1 - sy) * nodes_[iy * nx + ix] + sx * (1 - sy) * nodes_[iy * nx + ix + 1] +
                (1 - sx) * sy * nodes_[(iy + 1) * nx + ix] + sx * sy * nodes_[(iy + 1) * nx + ix + 1];
  return SpdMatrix(m);
}

double GridWeightTable::max_condition() const {
  double c = 1.0;
  for (const auto& m : nodes_) c = std::max(c, condition_of(SpdMatrix(m)));
  return c;
}

std::vector<GridWeightTable::Row> read_weight_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::io, "cannot open weight CSV '" + path + "'");
  std::vector<GridWeightTable::Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    GridWeightTable::Row r{};
    if (!(ss >> r.x >> r.y >> r.m11 >> r.m12 >> r.m22)) {
      if (rows.empty()) continue;  // header
      raise(ErrorKind::invalid_input, "malformed weight CSV row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

MatrixWeightField grid_field(std::shared_ptr<const GridWeightTable> table) {
  // A convex blend of SPD matrices cannot exceed the largest node condition number.
  return MatrixWeightField(2, std::max(1.0, table->max_condition()), WeightFamily::user_supplied,
                           [table](const Vec2& x) { return table->evaluate(x); }, {},
                           {{"family", "grid"}});
}

namespace {

SpdMatrix matrix_from_json(const nlohmann::json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::config, "matrix must be a nested array");
  const auto n = static_cast<Eigen::Index>(j.size());
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(j[i].is_array() && static_cast<Eigen::Index>(j[i].size()) == n, ErrorKind::config,
            "matrix rows must have equal length");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
  }
  return SpdMatrix(m);
}

Vec2 point_from_json(const nlohmann::json& j) {
  require(j.is_array() && j.size() == 2, ErrorKind::config, "point must be [x, y]");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

MatrixWeightField field_from_json(const nlohmann::json& spec, const std::string& base_dir) {
  require(spec.is_object() && spec.contains("family"), ErrorKind::config,
          "weight spec needs a \"family\" key");
  const std::string family = spec.at("family").get<std::string>();
  try {
    MatrixWeightField field = [&]() -> MatrixWeightField {
      if (family == "constant") {
        const SpdMatrix m = spec.contains("matrix") ? matrix_from_json(spec.at("matrix"))
                                                    : SpdMatrix::identity(2);
        return constant_field(m);
      }
      if (family == "power") {
        const double e = spec.at("exponent").get<double>();
        const Vec2 a = spec.contains("anchor") ? point_from_json(spec.at("anchor")) : Vec2::Zero();
        const SpdMatrix base =
            spec.contains("base") ? matrix_from_json(spec.at("base")) : SpdMatrix::identity(2);
        return power_field(e, a, base);
      }
      if (family == "rotated_anisotropic") {
        return rotated_anisotropic_field(spec.at("ratio").get<double>(), spec.value("theta0", 0.0),
                                         spec.value("rate", 1.0), spec.value("scale", 1.0));
      }
      if (family == "grid") {
        std::filesystem::path p = spec.at("csv").get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return grid_field(std::make_shared<GridWeightTable>(read_weight_csv(p.string())));
      }
      raise(ErrorKind::config, "unknown weight family '" + family + "'");
    }();
    if (spec.contains("lambda")) {
      const double declared = spec.at("lambda").get<double>();
      require(declared >= 1.0, ErrorKind::config, "weight lambda must be >= 1");
      require(declared >= field.lambda_bound() * (1 - 1e-12), ErrorKind::config,
              "declared lambda is smaller than the family's condition number");
    }
    return field;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::config, std::string("weight spec: ") + e.what());
  }
}

ConditionCheck condition_product(const MatrixWeightField& field, const Vec2& x) {
  const SpdMatrix m = field(x);
  const double v = spectral_norm(m) * spectral_norm(m.inverse());
  return {v, v > field.lambda_bound() * (1.0 + 1e-9)};
}

double scalar_weight(const MatrixWeightField& field, const Vec2& x) { return spectral_norm(field(x)); }

}  // namespace wplap
