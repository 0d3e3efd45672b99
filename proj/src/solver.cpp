#include "wplap/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>

namespace wplap {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::VectorXd;

constexpr std::size_t kDirectLimit = 200'000;

// Free (non-boundary) node numbering.
struct Dofs {
  std::vector<int> index;  // -1 on boundary nodes
  std::size_t count = 0;

  explicit Dofs(const Mesh& mesh) : index(mesh.num_nodes(), -1) {
    for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
      if (!mesh.boundary[v]) index[v] = static_cast<int>(count++);
    }
  }
};

struct ElementData {
  double area;
  std::array<Vec2, 3> grads;
  Eigen::Matrix2d m;
  Eigen::Matrix2d m2;
  Vec2 f;
};

Eigen::Matrix2d to_fixed(const Mat& a) {
  Eigen::Matrix2d out;
  out << a(0, 0), a(0, 1), a(1, 0), a(1, 1);
  return out;
}

SpdMatrix clamp_weight(const SpdMatrix& m, const WeightClamp& c, bool& hit) {
  const auto& e = m.eigen();
  VecN vals = e.values;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    const double clipped = std::clamp(vals(i), c.lower, c.upper);
    if (clipped != vals(i)) hit = true;
    vals(i) = clipped;
  }
  return SpdMatrix(e.vectors * vals.asDiagonal() * e.vectors.transpose());
}

std::vector<ElementData> element_data(const Mesh& mesh, const MatrixWeightField& weight, const DiscreteVectorField& f,
                                      const std::optional<WeightClamp>& clamp, bool* clamped) {
  std::vector<ElementData> data(mesh.num_triangles());
  bool hit = false;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    if (!(area > 0.0)) raise(ErrorKind::assembly, "element " + std::to_string(t) + " has non-positive area");
    try {
      SpdMatrix w = weight(mesh.centroid(t));
      if (clamp) w = clamp_weight(w, *clamp, hit);
      data[t].m = to_fixed(w.mat());
      data[t].m2 = to_fixed(w.squared().mat());
    } catch (const Error& e) {
      raise(ErrorKind::assembly, "element " + std::to_string(t) + ": weight not usable (" + e.what() + ")");
    }
    if (!data[t].m2.allFinite()) raise(ErrorKind::assembly, "element " + std::to_string(t) + ": non-finite weight");
    data[t].area = area;
    data[t].grads = mesh.basis_gradients(t);
    data[t].f = f.values[t];
  }
  if (clamped) *clamped = hit;
  return data;
}

Vec2 element_gradient(const Mesh& mesh, const ElementData& e, std::size_t t, const VectorXd& values) {
  Vec2 g = Vec2::Zero();
  for (int a = 0; a < 3; ++a) g += values(mesh.triangles[t][a]) * e.grads[a];
  return g;
}

// Solves K x = b to relative residual 1e-12 (direct below the size limit).
class SpdSolver {
public:
  bool factor(const SpMat& k) {
    if (k.rows() <= static_cast<Eigen::Index>(kDirectLimit)) {
      if (!analyzed_) {
        ldlt_.analyzePattern(k);
        analyzed_ = true;
      }
      ldlt_.factorize(k);
      if (ldlt_.info() != Eigen::Success) return false;
      // LDL^T of an SPD matrix has a positive diagonal.
      if ((ldlt_.vectorD().array() <= 0.0).any()) return false;
      direct_ = true;
    } else {
      cg_.setTolerance(1e-12);
      cg_.setMaxIterations(std::max<Eigen::Index>(1000, 10 * k.rows()));
      cg_.compute(k);
      direct_ = false;
    }
    k_ = &k;
    return true;
  }

  VectorXd solve(const VectorXd& b) {
    VectorXd x = direct_ ? VectorXd(ldlt_.solve(b)) : VectorXd(cg_.solve(b));
    if (direct_) {
      // Iterative refinement against round-off.
      for (int it = 0; it < 3; ++it) {
        const VectorXd r = b - (*k_) * x;
        if (r.norm() <= 1e-12 * std::max(b.norm(), 1e-300)) break;
        x += ldlt_.solve(r);
      }
    }
    return x;
  }

private:
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg_;
  const SpMat* k_ = nullptr;
  bool analyzed_ = false;
  bool direct_ = true;
};

void require_same_mesh(const MeshPtr& mesh, const DiscreteVectorField& f) {
  require(mesh != nullptr, ErrorKind::invalid_input, "solver: mesh is null");
  require(f.mesh == mesh || (f.mesh && f.values.size() == mesh->num_triangles()), ErrorKind::invalid_input,
          "solver: datum F lives on a different mesh");
  require(f.values.size() == mesh->num_triangles(), ErrorKind::invalid_input,
          "solver: datum F needs one vector per triangle");
}

// Per-element regularized flux and tangent for the p-energy.
struct Local {
  double energy;
  Vec2 flux;               // s^{(p-2)/2} M^2 g
  Eigen::Matrix2d tangent;  // its derivative in g
};

Local local_terms(const ElementData& e, const Vec2& g, double p, double delta) {
  const Vec2 xi = e.m * g;
  const double s = delta * delta + xi.squaredNorm();
  Local out{};
  if (s == 0.0) {
    out.energy = 0.0;
    out.flux = Vec2::Zero();
    out.tangent = p == 2.0 ? e.m2 : Eigen::Matrix2d::Zero();
    return out;
  }
  const double w = std::pow(s, 0.5 * (p - 2.0));
  const Vec2 m2g = e.m2 * g;
  out.energy = std::pow(s, 0.5 * p) / p;
  out.flux = w * m2g;
  out.tangent = w * e.m2 + (p - 2.0) * (w / s) * (m2g * m2g.transpose());
  return out;
}

Vec2 data_flux(const ElementData& e, double p) {
  const Vec2 mf = e.m * e.f;
  const double n = mf.norm();
  if (n == 0.0) return Vec2::Zero();
  return std::pow(n, p - 2.0) * (e.m2 * e.f);
}

}  // namespace

void DiscreteScalarField::validate() const {
  require(mesh != nullptr, ErrorKind::invalid_input, "DiscreteScalarField: mesh is null");
  require(static_cast<std::size_t>(values.size()) == mesh->num_nodes(), ErrorKind::invalid_input,
          "DiscreteScalarField: value count differs from node count");
  if (zero_on_boundary) {
    for (std::size_t v = 0; v < mesh->num_nodes(); ++v) {
      require(!mesh->boundary[v] || values(v) == 0.0, ErrorKind::invalid_input,
              "DiscreteScalarField: boundary node " + std::to_string(v) + " is not zero");
    }
  }
}

void DiscreteVectorField::validate() const {
  require(mesh != nullptr, ErrorKind::invalid_input, "DiscreteVectorField: mesh is null");
  require(values.size() == mesh->num_triangles(), ErrorKind::invalid_input,
          "DiscreteVectorField: vector count differs from triangle count");
}

DiscreteScalarField interpolate(const MeshPtr& mesh, const std::function<double(const Vec2&)>& f,
                                bool zero_on_boundary) {
  DiscreteScalarField u{mesh, VectorXd(mesh->num_nodes()), zero_on_boundary};
  for (std::size_t v = 0; v < mesh->num_nodes(); ++v) {
    u.values(v) = zero_on_boundary && mesh->boundary[v] ? 0.0 : f(mesh->nodes[v]);
  }
  return u;
}

DiscreteVectorField gradient(const DiscreteScalarField& u) {
  u.validate();
  const Mesh& mesh = *u.mesh;
  DiscreteVectorField g{u.mesh, std::vector<Vec2>(mesh.num_triangles())};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto grads = mesh.basis_gradients(t);
    Vec2 s = Vec2::Zero();
    for (int a = 0; a < 3; ++a) s += u.values(mesh.triangles[t][a]) * grads[a];
    g.values[t] = s;
  }
  return g;
}

DiscreteVectorField sample_at_centroids(const MeshPtr& mesh, const std::function<Vec2(const Vec2&)>& f) {
  DiscreteVectorField out{mesh, std::vector<Vec2>(mesh->num_triangles())};
  for (std::size_t t = 0; t < mesh->num_triangles(); ++t) out.values[t] = f(mesh->centroid(t));
  return out;
}

void SolveConfig::validate() const {
  require(std::isfinite(p) && p > 1.0, ErrorKind::config, "solver: p must exceed 1");
  require(tolerance > 0.0, ErrorKind::config, "solver: tolerance must be positive");
  require(max_iterations > 0, ErrorKind::config, "solver: max_iterations must be positive");
  require(!ladder.empty(), ErrorKind::config, "solver: regularization ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    require(ladder[i] >= 0.0, ErrorKind::config, "solver: ladder entries must be >= 0");
    if (i > 0) require(ladder[i] < ladder[i - 1], ErrorKind::config, "solver: ladder must be decreasing");
  }
  if (clamp) {
    require(clamp->lower > 0.0 && clamp->upper >= clamp->lower, ErrorKind::config,
            "solver: clamp needs 0 < lower <= upper");
  }
}

SolveConfig SolveConfig::from_json(const nlohmann::json& j) {
  SolveConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) raise(ErrorKind::config, "solver: config must be an object");
  try {
    c.p = j.value("p", c.p);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    if (j.contains("ladder")) c.ladder = j["ladder"].get<std::vector<double>>();
    c.line_search = j.value("line_search", c.line_search);
    if (j.contains("clamp")) {
      const auto& cl = j["clamp"];
      c.clamp = WeightClamp{cl.at(0).get<double>(), cl.at(1).get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::config, std::string("solver: bad config field (") + e.what() + ")");
  }
  c.validate();
  return c;
}

nlohmann::json SolveReport::to_json() const {
  nlohmann::json rungs_json = nlohmann::json::array();
  for (const auto& r : rungs) {
    rungs_json.push_back({{"delta", r.delta}, {"iterations", r.iterations}, {"residual", r.residual}});
  }
  return nlohmann::json{{"p", p},
                        {"rungs", rungs_json},
                        {"final_residual", final_residual},
                        {"energy", energy},
                        {"energy_history", energy_history},
                        {"clamped", clamped},
                        {"unknowns", unknowns}};
}

DiscreteScalarField solve_linear(const MeshPtr& mesh, const MatrixWeightField& a, const DiscreteVectorField& f) {
  require_same_mesh(mesh, f);
  const Dofs dofs(*mesh);
  const auto data = element_data(*mesh, a, f, std::nullopt, nullptr);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh->num_triangles());
  VectorXd b = VectorXd::Zero(static_cast<Eigen::Index>(dofs.count));
  for (std::size_t t = 0; t < mesh->num_triangles(); ++t) {
    // a_field is A itself here, so use data.m (not its square).
    const auto& e = data[t];
    const Vec2 af = e.m * e.f;
    for (int i = 0; i < 3; ++i) {
      const int gi = dofs.index[mesh->triangles[t][i]];
      if (gi < 0) continue;
      b(gi) += e.area * af.dot(e.grads[i]);
      for (int j = 0; j < 3; ++j) {
        const int gj = dofs.index[mesh->triangles[t][j]];
        if (gj < 0) continue;
        trip.emplace_back(gi, gj, e.area * e.grads[j].dot(e.m * e.grads[i]));
      }
    }
  }
  DiscreteScalarField u{mesh, VectorXd::Zero(static_cast<Eigen::Index>(mesh->num_nodes())), true};
  if (dofs.count == 0) return u;
  SpMat k(static_cast<Eigen::Index>(dofs.count), static_cast<Eigen::Index>(dofs.count));
  k.setFromTriplets(trip.begin(), trip.end());
  SpdSolver solver;
  if (!solver.factor(k)) raise(ErrorKind::assembly, "solve_linear: stiffness matrix is singular");
  const VectorXd x = solver.solve(b);
  if (!x.allFinite()) raise(ErrorKind::assembly, "solve_linear: solution is not finite");
  for (std::size_t v = 0; v < mesh->num_nodes(); ++v) {
    if (dofs.index[v] >= 0) u.values(v) = x(dofs.index[v]);
  }
  return u;
}

namespace {

class PLaplaceProblem {
public:
  PLaplaceProblem(const Mesh& mesh, std::vector<ElementData> data, double p)
      : mesh_(mesh), dofs_(mesh), data_(std::move(data)), p_(p) {
    data_flux_.resize(data_.size());
    load_ = VectorXd::Zero(static_cast<Eigen::Index>(dofs_.count));
    for (std::size_t t = 0; t < data_.size(); ++t) {
      data_flux_[t] = data_flux(data_[t], p_);
      for (int i = 0; i < 3; ++i) {
        const int gi = dofs_.index[mesh_.triangles[t][i]];
        if (gi >= 0) load_(gi) += data_[t].area * data_flux_[t].dot(data_[t].grads[i]);
      }
    }
  }

  std::size_t unknowns() const { return dofs_.count; }
  const VectorXd& load() const { return load_; }

  VectorXd expand(const VectorXd& x) const {
    VectorXd full = VectorXd::Zero(static_cast<Eigen::Index>(mesh_.num_nodes()));
    for (std::size_t v = 0; v < mesh_.num_nodes(); ++v) {
      if (dofs_.index[v] >= 0) full(v) = x(dofs_.index[v]);
    }
    return full;
  }

  double energy(const VectorXd& x, double delta) const {
    const VectorXd full = expand(x);
    long double sum = 0.0L;
    for (std::size_t t = 0; t < data_.size(); ++t) {
      const Vec2 g = element_gradient(mesh_, data_[t], t, full);
      const Local l = local_terms(data_[t], g, p_, delta);
      sum += static_cast<long double>(data_[t].area) * (l.energy - data_flux_[t].dot(g));
    }
    return static_cast<double>(sum);
  }

  // Gradient of the regularized energy, and the tangent matrix when requested.
  VectorXd residual(const VectorXd& x, double delta, SpMat* tangent) const {
    const VectorXd full = expand(x);
    VectorXd r = -load_;
    std::vector<Eigen::Triplet<double>> trip;
    if (tangent) trip.reserve(9 * data_.size());
    for (std::size_t t = 0; t < data_.size(); ++t) {
      const auto& e = data_[t];
      const Vec2 g = element_gradient(mesh_, e, t, full);
      const Local l = local_terms(e, g, p_, delta);
      for (int i = 0; i < 3; ++i) {
        const int gi = dofs_.index[mesh_.triangles[t][i]];
        if (gi < 0) continue;
        r(gi) += e.area * l.flux.dot(e.grads[i]);
        if (!tangent) continue;
        for (int j = 0; j < 3; ++j) {
          const int gj = dofs_.index[mesh_.triangles[t][j]];
          if (gj >= 0) trip.emplace_back(gi, gj, e.area * e.grads[i].dot(l.tangent * e.grads[j]));
        }
      }
    }
    if (tangent) {
      tangent->resize(static_cast<Eigen::Index>(dofs_.count), static_cast<Eigen::Index>(dofs_.count));
      tangent->setFromTriplets(trip.begin(), trip.end());
    }
    return r;
  }

private:
  const Mesh& mesh_;
  Dofs dofs_;
  std::vector<ElementData> data_;
  std::vector<Vec2> data_flux_;
  VectorXd load_;
  double p_;
};

}  // namespace

std::pair<DiscreteScalarField, SolveReport> solve_plaplace(const MeshPtr& mesh, const MatrixWeightField& m,
                                                           const DiscreteVectorField& f, const SolveConfig& config) {
  config.validate();
  require_same_mesh(mesh, f);
  SolveReport report;
  report.p = config.p;
  bool clamped = false;
  PLaplaceProblem problem(*mesh, element_data(*mesh, m, f, config.clamp, &clamped), config.p);
  report.clamped = clamped;
  report.unknowns = problem.unknowns();

  DiscreteScalarField u{mesh, VectorXd::Zero(static_cast<Eigen::Index>(mesh->num_nodes())), true};
  const double load_norm = problem.load().norm();
  if (problem.unknowns() == 0 || load_norm == 0.0) {
    // Zero datum: the minimizer is zero.
    report.energy = 0.0;
    report.energy_history.push_back(0.0);
    return {u, report};
  }

  std::vector<double> rungs;
  for (double d : config.ladder) {
    if (d == 0.0 && config.p < 2.0) continue;
    rungs.push_back(d);
  }

  VectorXd x = VectorXd::Zero(static_cast<Eigen::Index>(problem.unknowns()));
  SpdSolver solver;
  SpMat tangent;
  for (std::size_t k = 0; k < rungs.size(); ++k) {
    const double delta = rungs[k];
    const bool last = k + 1 == rungs.size();
    const double tol = last ? config.tolerance : std::max(config.tolerance, 1e-6);
    RungReport rung{delta, 0, 0.0};
    double e_cur = problem.energy(x, delta);
    report.energy_history.push_back(e_cur);
    bool done = false;
    for (int it = 0; it <= config.max_iterations; ++it) {
      const VectorXd r = problem.residual(x, delta, &tangent);
      rung.residual = r.norm() / load_norm;
      if (rung.residual <= tol) {
        done = true;
        break;
      }
      if (it == config.max_iterations) break;
      ++rung.iterations;

      VectorXd d;
      double shift = 0.0;
      const double diag_scale = tangent.diagonal().cwiseAbs().maxCoeff();
      for (int attempt = 0; attempt < 12; ++attempt) {
        SpMat shifted = tangent;
        if (shift > 0.0) {
          for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) += shift;
        }
        if (solver.factor(shifted)) {
          d = -solver.solve(r);
          if (d.allFinite() && d.dot(r) < 0.0) break;
        }
        d.resize(0);
        shift = shift == 0.0 ? 1e-10 * std::max(diag_scale, 1e-300) : 10.0 * shift;
      }
      if (d.size() == 0) {
        report.rungs.push_back(rung);
        report.final_residual = rung.residual;
        throw SolveFailure(ErrorKind::stall, "solve_plaplace: no descent direction at delta = " +
                                                 std::to_string(delta), report);
      }

      const double slope = r.dot(d);
      double step = 1.0;
      double e_new = problem.energy(x + d, delta);
      if (config.line_search) {
        // Armijo backtracking; below round-off the decrease is not measurable.
        const double floor = 1e-13 * (std::abs(e_cur) + 1e-300);
        while (e_new > e_cur + 1e-4 * step * slope && -step * slope > floor) {
          step *= 0.5;
          if (step < 1e-12) break;
          e_new = problem.energy(x + step * d, delta);
        }
        if (step < 1e-12) {
          report.rungs.push_back(rung);
          report.final_residual = rung.residual;
          throw SolveFailure(ErrorKind::stall, "solve_plaplace: line search failed at delta = " +
                                                   std::to_string(delta), report);
        }
      }
      x += step * d;
      e_cur = e_new;
      report.energy_history.push_back(e_cur);
    }
    report.rungs.push_back(rung);
    report.final_residual = rung.residual;
    if (!done) {
      throw SolveFailure(ErrorKind::convergence, "solve_plaplace: no convergence within " +
                                                     std::to_string(config.max_iterations) +
                                                     " iterations at delta = " + std::to_string(delta),
                         report);
    }
  }
  u.values = problem.expand(x);
  report.energy = problem.energy(x, rungs.back());
  return {u, report};
}

double plaplace_energy(const DiscreteScalarField& v, const MatrixWeightField& m, const DiscreteVectorField& f,
                       double p) {
  v.validate();
  require_same_mesh(v.mesh, f);
  const Mesh& mesh = *v.mesh;
  const auto data = element_data(mesh, m, f, std::nullopt, nullptr);
  long double sum = 0.0L;
  for (std::size_t t = 0; t < data.size(); ++t) {
    const Vec2 g = element_gradient(mesh, data[t], t, v.values);
    sum += static_cast<long double>(data[t].area) *
           (local_terms(data[t], g, p, 0.0).energy - data_flux(data[t], p).dot(g));
  }
  return static_cast<double>(sum);
}

double weak_residual(const DiscreteScalarField& u, const MatrixWeightField& m, const DiscreteVectorField& f,
                     double p) {
  u.validate();
  require_same_mesh(u.mesh, f);
  const Mesh& mesh = *u.mesh;
  PLaplaceProblem problem(mesh, element_data(mesh, m, f, std::nullopt, nullptr), p);
  const Dofs dofs(mesh);
  VectorXd x(static_cast<Eigen::Index>(dofs.count));
  for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
    if (dofs.index[v] >= 0) x(dofs.index[v]) = u.values(v);
  }
  const double ln = problem.load().norm();
  const VectorXd r = problem.residual(x, 0.0, nullptr);
  return ln > 0.0 ? r.norm() / ln : r.norm();
}

EnergyRatio energy_ratio(const DiscreteScalarField& u, const DiscreteVectorField& f, const MatrixWeightField& m,
                         double p) {
  const DiscreteVectorField g = gradient(u);
  require_same_mesh(u.mesh, f);
  const Mesh& mesh = *u.mesh;
  long double num = 0.0L, den = 0.0L;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double omega = spectral_norm(m(mesh.centroid(t)));
    const double w = mesh.triangle_area(t) * std::pow(omega, p);
    num += w * std::pow(g.values[t].norm(), p);
    den += w * std::pow(f.values[t].norm(), p);
  }
  if (den == 0.0L) return EnergyRatio{0.0, true};
  return EnergyRatio{static_cast<double>(num / den), false};
}

double h1_seminorm_error(const DiscreteScalarField& u, const std::function<Vec2(const Vec2&)>& exact_gradient) {
  const DiscreteVectorField g = gradient(u);
  const Mesh& mesh = *u.mesh;
  long double sum = 0.0L;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    double local = 0.0;
    for (int a = 0; a < 3; ++a) {
      const Vec2 mid = 0.5 * (mesh.nodes[tri[a]] + mesh.nodes[tri[(a + 1) % 3]]);
      local += (g.values[t] - exact_gradient(mid)).squaredNorm() / 3.0;
    }
    sum += static_cast<long double>(mesh.triangle_area(t)) * local;
  }
  return std::sqrt(static_cast<double>(sum));
}

}  // namespace wplap
