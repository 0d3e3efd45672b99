#include "wplap/experiments.hpp"

#include "wplap/error.hpp"
#include "wplap/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace wplap {

namespace {

struct Meshes {
  MeshPtr coarse;
  MeshPtr fine;
};

Meshes corner_meshes(double eps, int chords, double h) {
  const PolygonalDomain domain = corner_domain(eps, chords);
  auto coarse = std::make_shared<const Mesh>(mesh_generate(domain, h));
  auto fine = std::make_shared<const Mesh>(refine_uniform(*coarse));
  return {coarse, fine};
}

SweepSummary summarize(const std::vector<SweepRow>& rows) {
  SweepSummary s;
  for (const auto& r : rows) {
    if (!std::isfinite(r.ratio)) s.finite = false;
    double& sup = r.level == 0 ? s.sup_coarse : s.sup_fine;
    sup = std::max(sup, r.ratio);
  }
  s.relative_change = s.sup_coarse > 0.0 ? std::abs(s.sup_fine - s.sup_coarse) / s.sup_coarse : 0.0;
  return s;
}

nlohmann::json rows_json(const std::vector<SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"seed", r.seed}, {"level", r.level}, {"ratio", r.ratio}, {"zero_datum", r.zero_datum}});
  }
  return out;
}

nlohmann::json summary_json(const SweepSummary& s) {
  return nlohmann::json{{"sup_coarse", s.sup_coarse},
                        {"sup_fine", s.sup_fine},
                        {"relative_change", s.relative_change},
                        {"finite", s.finite}};
}

}  // namespace

std::function<Vec2(const Vec2&)> random_smooth_field(std::uint64_t seed, const RandomFieldSpec& spec) {
  require(spec.modes >= 1 && spec.max_frequency > 0.0, ErrorKind::invalid_input,
          "random_smooth_field: need modes >= 1 and a positive frequency bound");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> freq(-spec.max_frequency, spec.max_frequency);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> amp(0.0, spec.amplitude);
  struct Wave {
    Vec2 k;
    double phase;
    double a;
  };
  std::vector<Wave> wx, wy;
  for (int m = 0; m < spec.modes; ++m) {
    const Vec2 kx(freq(rng), freq(rng));
    const double px = phase(rng), ax = amp(rng);
    const Vec2 ky(freq(rng), freq(rng));
    const double py = phase(rng), ay = amp(rng);
    wx.push_back({kx, px, ax});
    wy.push_back({ky, py, ay});
  }
  return [wx, wy](const Vec2& x) {
    Vec2 v = Vec2::Zero();
    for (const auto& w : wx) v.x() += w.a * std::cos(w.k.dot(x) + w.phase);
    for (const auto& w : wy) v.y() += w.a * std::cos(w.k.dot(x) + w.phase);
    return v;
  };
}

nlohmann::json EnergySweepResult::to_json() const {
  return nlohmann::json{{"rows", rows_json(rows)}, {"summary", summary_json(summary)}};
}

EnergySweepResult energy_sweep(const EnergySweepConfig& config) {
  require(config.seeds >= 1, ErrorKind::config, "energy_sweep: need at least one seed");
  const Meshes meshes = corner_meshes(config.boundary_eps, config.chords, config.h);
  const MatrixWeightField m = power_field(config.weight_exponent);
  SolveConfig sc;
  sc.p = config.p;
  std::vector<SweepRow> rows(2 * static_cast<std::size_t>(config.seeds));
  parallel_for(rows.size(), config.threads, [&](std::size_t idx) {
    const int level = static_cast<int>(idx % 2);
    const std::uint64_t seed = config.base_seed + idx / 2;
    const MeshPtr& mesh = level == 0 ? meshes.coarse : meshes.fine;
    const DiscreteVectorField f = sample_at_centroids(mesh, random_smooth_field(seed));
    const auto [u, report] = solve_plaplace(mesh, m, f, sc);
    const EnergyRatio er = energy_ratio(u, f, m, config.p);
    rows[idx] = SweepRow{seed, level, er.value, er.zero_datum};
  });
  EnergySweepResult out;
  out.rows = std::move(rows);
  out.summary = summarize(out.rows);
  return out;
}

nlohmann::json CzSweepResult::to_json() const {
  return nlohmann::json{{"rows", rows_json(rows)},
                        {"summary", summary_json(summary)},
                        {"self_test_ratio", self_test_ratio},
                        {"weight_small", weight_small},
                        {"boundary_small", boundary_small},
                        {"hypotheses_satisfied", hypotheses_satisfied}};
}

std::string CzSweepResult::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "seed,level,ratio,hypotheses\n";
  const char* tag = hypotheses_satisfied ? "satisfied" : "outside";
  os << "self_test,0," << self_test_ratio << ',' << tag << '\n';
  for (const auto& r : rows) os << r.seed << ',' << r.level << ',' << r.ratio << ',' << tag << '\n';
  return os.str();
}

CzSweepResult cz_sweep(const CzSweepConfig& config) {
  require(config.seeds >= 1, ErrorKind::config, "cz_sweep: need at least one seed");
  require(config.q > 1.0 && config.q >= config.p, ErrorKind::config, "cz_sweep: need q >= p and q > 1");
  const Meshes meshes = corner_meshes(config.boundary_eps, config.chords, config.h);
  const MatrixWeightField m = power_field(config.weight_exponent);
  const ScalarFn omega = weight_norm_fn(m);
  SolveConfig sc;
  sc.p = config.p;
  std::vector<SweepRow> rows(2 * static_cast<std::size_t>(config.seeds));
  parallel_for(rows.size(), config.threads, [&](std::size_t idx) {
    const int level = static_cast<int>(idx % 2);
    const std::uint64_t seed = config.base_seed + idx / 2;
    const MeshPtr& mesh = level == 0 ? meshes.coarse : meshes.fine;
    const DiscreteVectorField f = sample_at_centroids(mesh, random_smooth_field(seed));
    const auto [u, report] = solve_plaplace(mesh, m, f, sc);
    const CzRatio r = cz_ratio(u, f, omega, config.q);
    rows[idx] = SweepRow{seed, level, r.value, r.zero_datum};
  });
  CzSweepResult out;
  out.rows = std::move(rows);
  out.summary = summarize(out.rows);
  {
    // Self-test: solving with the datum F = grad u_h gives back u_h, so the
    // ratio is 1 up to the solver tolerance.
    const DiscreteVectorField f = sample_at_centroids(meshes.coarse, random_smooth_field(config.base_seed));
    const auto [u, report] = solve_plaplace(meshes.coarse, m, f, sc);
    const DiscreteVectorField g = gradient(u);
    const auto [v, again] = solve_plaplace(meshes.coarse, m, g, sc);
    out.self_test_ratio = cz_ratio(v, g, omega, config.q).value;
  }
  out.weight_small = config.weight_exponent * config.q <= config.smallness_threshold;
  out.boundary_small = config.boundary_eps * config.q <= config.smallness_threshold;
  out.hypotheses_satisfied = out.weight_small && out.boundary_small;
  return out;
}

}  // namespace wplap
