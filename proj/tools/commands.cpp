#include "commands.hpp"

#include "wplap/analysis.hpp"
#include "wplap/corner.hpp"
#include "wplap/error.hpp"
#include "wplap/experiments.hpp"
#include "wplap/oscillation.hpp"
#include "wplap/report_io.hpp"
#include "wplap/solver.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace wplap::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Loaded {
  json config;
  fs::path base_dir;
  std::uint64_t seed = 0;
};

Loaded load(const RunOptions& opts) {
  if (opts.config.empty()) raise(ErrorKind::config, "--config is required");
  Loaded l;
  l.config = read_json(opts.config);
  if (!l.config.is_object()) raise(ErrorKind::config, "config must be a JSON object");
  l.base_dir = opts.config.parent_path();
  if (l.base_dir.empty()) l.base_dir = ".";
  try {
    l.seed = opts.seed ? *opts.seed : l.config.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    raise(ErrorKind::config, std::string("seed: ") + e.what());
  }
  require(opts.threads >= 1, ErrorKind::config, "--threads must be >= 1");
  require(opts.format == "csv" || opts.format == "json", ErrorKind::config, "--format must be csv or json");
  fs::create_directories(opts.out);
  return l;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    raise(ErrorKind::config, std::string("config field '") + key + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_relative() ? base / path : path;
}

Provenance provenance(const json& effective, std::uint64_t seed) { return Provenance::of(effective, seed); }

MatrixWeightField weight_from(const json& config, const fs::path& base) {
  if (!config.contains("weight")) return constant_field(SpdMatrix::identity(2));
  return field_from_json(config["weight"], base.string());
}

std::function<Vec2(const Vec2&)> datum_function(const json& d, std::uint64_t seed) {
  const std::string type = get_or<std::string>(d, "type", "");
  if (type == "zero") return [](const Vec2&) { return Vec2(0.0, 0.0); };
  if (type == "constant") {
    const auto v = get_or<std::vector<double>>(d, "value", {1.0, 0.0});
    require(v.size() == 2, ErrorKind::config, "datum: constant value must have two entries");
    return [v](const Vec2&) { return Vec2(v[0], v[1]); };
  }
  if (type == "bubble_gradient") {
    // Gradient of x y (1 - x)(1 - y).
    return [](const Vec2& x) {
      return Vec2(x.y() * (1 - x.y()) * (1 - 2 * x.x()), x.x() * (1 - x.x()) * (1 - 2 * x.y()));
    };
  }
  if (type == "radial") {
    const double s = get_or<double>(d, "scale", 1.0);
    return [s](const Vec2& x) { return s * x * std::exp(-x.squaredNorm()); };
  }
  if (type == "random") {
    RandomFieldSpec spec;
    spec.modes = get_or<int>(d, "modes", spec.modes);
    spec.max_frequency = get_or<double>(d, "max_frequency", spec.max_frequency);
    return random_smooth_field(get_or<std::uint64_t>(d, "seed", seed), spec);
  }
  raise(ErrorKind::config, "datum: unknown type '" + type + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

BallSampler sampler_from(const json& config, std::uint64_t seed) {
  if (config.contains("balls")) {
    std::vector<Ball> balls;
    try {
      for (const auto& b : config["balls"]) {
        balls.emplace_back(Vec2(b.at(0).get<double>(), b.at(1).get<double>()), b.at(2).get<double>());
      }
    } catch (const json::exception& e) {
      raise(ErrorKind::config, std::string("balls: each entry must be [x, y, r] (") + e.what() + ")");
    }
    require(!balls.empty(), ErrorKind::config, "balls: list is empty");
    return BallSampler::from_balls(std::move(balls), seed);
  }
  BallSampler::Config c;
  c.seed = seed;
  if (config.contains("sampler")) {
    const json& s = config["sampler"];
    const auto lo = get_or<std::vector<double>>(s, "lo", {c.lo.x(), c.lo.y()});
    const auto hi = get_or<std::vector<double>>(s, "hi", {c.hi.x(), c.hi.y()});
    require(lo.size() == 2 && hi.size() == 2, ErrorKind::config, "sampler: lo and hi must be [x, y]");
    c.lo = Vec2(lo[0], lo[1]);
    c.hi = Vec2(hi[0], hi[1]);
    c.max_radius = get_or<double>(s, "max_radius", c.max_radius);
    c.levels = get_or<int>(s, "levels", c.levels);
    c.grid = get_or<int>(s, "grid", c.grid);
    c.random_count = get_or<int>(s, "random_count", c.random_count);
  }
  return BallSampler(c);
}

}  // namespace

std::vector<double> parse_q_grid(const std::string& text) {
  std::vector<double> out;
  try {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    } else {
      const double lo = std::stod(text.substr(0, dots));
      std::string rest = text.substr(dots + 2);
      double step = 0.25;
      const auto colon = rest.find(':');
      if (colon != std::string::npos) {
        step = std::stod(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
      }
      const double hi = std::stod(rest);
      require(step > 0.0 && hi >= lo, ErrorKind::config, "--q-grid: need lo <= hi and a positive step");
      const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
      for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
    }
  } catch (const std::logic_error&) {
    raise(ErrorKind::config, "--q-grid: cannot parse '" + text + "'");
  }
  require(!out.empty(), ErrorKind::config, "--q-grid is empty");
  for (double q : out) require(std::isfinite(q) && q > 1.0, ErrorKind::config, "--q-grid values must exceed 1");
  return out;
}

std::vector<fs::path> cmd_solve(const RunOptions& opts) {
  const Loaded l = load(opts);
  const json& c = l.config;
  const SolveConfig sc = SolveConfig::from_json(c.value("solver", json::object()));

  MeshPtr mesh;
  if (c.contains("mesh")) {
    mesh = std::make_shared<const Mesh>(read_mesh(resolve(l.base_dir, get_or<std::string>(c, "mesh", ""))));
  } else if (c.contains("domain")) {
    const PolygonalDomain domain = domain_from_json(c["domain"]);
    const double h = get_or<double>(c, "h", 0.1);
    std::optional<Grading> grading;
    if (c.contains("grading")) grading = Grading{Vec2::Zero(), get_or<double>(c, "grading", 0.0)};
    mesh = std::make_shared<const Mesh>(mesh_generate(domain, h, grading));
  } else {
    raise(ErrorKind::config, "solve: config needs \"mesh\" or \"domain\"");
  }

  const MatrixWeightField m = weight_from(c, l.base_dir);
  DiscreteVectorField f;
  if (!c.contains("datum")) raise(ErrorKind::config, "solve: config needs a \"datum\"");
  const json& d = c["datum"];
  if (get_or<std::string>(d, "type", "") == "csv") {
    f = read_element_csv(mesh, resolve(l.base_dir, get_or<std::string>(d, "path", "")));
  } else {
    f = sample_at_centroids(mesh, datum_function(d, l.seed));
  }

  DiscreteScalarField u;
  SolveReport report;
  std::string path;
  if (sc.p == 2.0 && !sc.clamp) {
    u = solve_linear(mesh, m.squared(), f);
    report.p = 2.0;
    report.unknowns = 0;
    for (char b : mesh->boundary) report.unknowns += b ? 0 : 1;
    report.final_residual = weak_residual(u, m, f, 2.0);
    report.energy = plaplace_energy(u, m, f, 2.0);
    report.energy_history = {report.energy};
    path = "linear";
  } else {
    std::tie(u, report) = solve_plaplace(mesh, m, f, sc);
    path = "nonlinear";
  }

  json effective = c;
  effective["seed"] = l.seed;
  const Provenance prov = provenance(effective, l.seed);
  const fs::path u_path = opts.out / "u.csv", g_path = opts.out / "grad.csv", r_path = opts.out / "report.json";
  write_text(u_path, nodal_csv(u, prov));
  write_text(g_path, element_csv(gradient(u), prov));
  json rep = report.to_json();
  rep["path"] = path;
  rep["nodes"] = mesh->num_nodes();
  rep["triangles"] = mesh->num_triangles();
  rep["h"] = mesh->h;
  rep["provenance"] = prov.to_json();
  write_json(r_path, rep);
  return {u_path, g_path, r_path};
}

std::vector<fs::path> cmd_oscillation(const RunOptions& opts) {
  const Loaded l = load(opts);
  const json& c = l.config;
  const MatrixWeightField m = weight_from(c, l.base_dir);
  const BallSampler sampler = sampler_from(c, l.seed);
  OscillationOptions oo;
  oo.threads = opts.threads;
  if (c.contains("quadrature")) {
    oo.quad.cells = get_or<int>(c["quadrature"], "cells", oo.quad.cells);
    oo.quad.subsamples = get_or<int>(c["quadrature"], "subsamples", oo.quad.subsamples);
  }
  if (c.contains("domain")) {
    auto domain = std::make_shared<PolygonalDomain>(domain_from_json(c["domain"]));
    oo.clip = [domain](const Vec2& x) { return domain->contains(x); };
  }
  const auto quantities =
      get_or<std::vector<std::string>>(c, "quantities", {"log_bmo", "muckenhoupt", "bmo2_mu", "bmo_mu"});
  const double p = get_or<double>(c, "p", 2.0);

  std::vector<OscillationReport> reports;
  std::optional<CmpReports> cmp;
  for (const auto& q : quantities) {
    if (q == "log_bmo") {
      reports.push_back(bmo_seminorm(m, sampler, oo));
    } else if (q == "muckenhoupt") {
      require(p > 1.0, ErrorKind::config, "oscillation: p must exceed 1");
      reports.push_back(muckenhoupt_constant(scalar_weight_of(m), m.singular_anchors(), p, sampler, oo));
    } else if (q == "bmo2_mu" || q == "bmo_mu") {
      if (!cmp) cmp = cmp_quantities(m.squared(), sampler, oo);
      reports.push_back(q == "bmo2_mu" ? cmp->bmo2_mu : cmp->bmo_mu);
    } else {
      raise(ErrorKind::config, "oscillation: unknown quantity '" + q + "'");
    }
  }

  json effective = c;
  effective["seed"] = l.seed;
  const Provenance prov = provenance(effective, l.seed);
  if (opts.format == "json") {
    json j{{"provenance", prov.to_json()}, {"reports", json::array()}};
    for (const auto& r : reports) j["reports"].push_back(r.to_json());
    const fs::path path = opts.out / "oscillation.json";
    write_json(path, j);
    return {path};
  }
  std::string csv = prov.comment_line() + OscillationReport::csv_header() + "\n";
  for (const auto& r : reports) csv += r.csv_row() + "\n";
  const fs::path path = opts.out / "oscillation.csv";
  write_text(path, csv);
  return {path};
}

std::vector<fs::path> cmd_sharpness(const RunOptions& opts) {
  const Loaded l = load(opts);
  const json& c = l.config;
  const double eps = opts.epsilon ? *opts.epsilon : get_or<double>(c, "epsilon", 1.0);
  if (!(std::isfinite(eps) && eps > 0.0 && eps <= 1.0)) {
    raise(ErrorKind::config, "sharpness: epsilon must lie in (0, 1], got " + fmt(eps));
  }
  std::vector<double> grid;
  if (opts.q_grid) {
    grid = parse_q_grid(*opts.q_grid);
  } else if (c.contains("q_grid")) {
    grid = get_or<std::vector<double>>(c, "q_grid", {});
  } else {
    grid = default_q_grid(eps);
  }
  ThresholdConfig tc;
  tc.k_min = get_or<int>(c, "k_min", tc.k_min);
  tc.k_max = get_or<int>(c, "k_max", tc.k_max);
  const ThresholdFit fit = threshold_fit(eps, grid, tc);

  json effective = c;
  effective["epsilon"] = eps;
  effective["q_grid"] = grid;
  effective["seed"] = l.seed;
  const Provenance prov = provenance(effective, l.seed);
  json summary = fit.to_json();
  summary["provenance"] = prov.to_json();
  if (opts.format == "json") {
    json rows = json::array();
    for (const auto& r : fit.rows) rows.push_back({{"q", r.q}, {"annulus_k", r.k}, {"norm", r.norm}});
    summary["rows"] = rows;
    const fs::path path = opts.out / "sharpness.json";
    write_json(path, summary);
    return {path};
  }
  std::string head = prov.comment_line();
  head += "# q_hat=" + (fit.inconclusive ? std::string("inconclusive") : fmt(fit.q_hat)) +
          " q_star=" + fmt(fit.q_star_analytic) + " inconclusive=" + (fit.inconclusive ? "true" : "false") + "\n";
  const fs::path table = opts.out / "sharpness.csv", sum = opts.out / "sharpness_summary.json";
  write_text(table, head + fit.to_csv());
  write_json(sum, summary);
  return {table, sum};
}

std::vector<fs::path> cmd_cz_sweep(const RunOptions& opts) {
  const Loaded l = load(opts);
  const json& c = l.config;
  CzSweepConfig cfg;
  cfg.boundary_eps = get_or<double>(c, "boundary_eps", cfg.boundary_eps);
  cfg.weight_exponent = get_or<double>(c, "weight_exponent", cfg.weight_exponent);
  cfg.p = get_or<double>(c, "p", cfg.p);
  cfg.q = get_or<double>(c, "q", cfg.q);
  cfg.h = get_or<double>(c, "h", cfg.h);
  cfg.seeds = get_or<int>(c, "seeds", cfg.seeds);
  cfg.chords = get_or<int>(c, "chords", cfg.chords);
  cfg.smallness_threshold = get_or<double>(c, "smallness_threshold", cfg.smallness_threshold);
  cfg.base_seed = l.seed;
  cfg.threads = opts.threads;
  require(cfg.p > 1.0, ErrorKind::config, "cz-sweep: p must exceed 1");
  require(cfg.h > 0.0, ErrorKind::config, "cz-sweep: h must be positive");
  if (!(cfg.boundary_eps > 0.0 && cfg.boundary_eps <= 1.0)) {
    raise(ErrorKind::config, "cz-sweep: boundary_eps must lie in (0, 1]");
  }
  const CzSweepResult res = cz_sweep(cfg);

  json effective = c;
  effective["seed"] = l.seed;
  const Provenance prov = provenance(effective, l.seed);
  if (opts.format == "json") {
    json j = res.to_json();
    j["provenance"] = prov.to_json();
    const fs::path path = opts.out / "cz_sweep.json";
    write_json(path, j);
    return {path};
  }
  const fs::path path = opts.out / "cz_sweep.csv";
  write_text(path, prov.comment_line() + res.to_csv());
  return {path};
}

std::vector<fs::path> cmd_energy_sweep(const RunOptions& opts) {
  const Loaded l = load(opts);
  const json& c = l.config;
  EnergySweepConfig cfg;
  cfg.boundary_eps = get_or<double>(c, "boundary_eps", cfg.boundary_eps);
  cfg.weight_exponent = get_or<double>(c, "weight_exponent", cfg.weight_exponent);
  cfg.p = get_or<double>(c, "p", cfg.p);
  cfg.h = get_or<double>(c, "h", cfg.h);
  cfg.seeds = get_or<int>(c, "seeds", cfg.seeds);
  cfg.chords = get_or<int>(c, "chords", cfg.chords);
  cfg.base_seed = l.seed;
  cfg.threads = opts.threads;
  require(cfg.p > 1.0, ErrorKind::config, "energy-sweep: p must exceed 1");
  const EnergySweepResult res = energy_sweep(cfg);

  json effective = c;
  effective["seed"] = l.seed;
  const Provenance prov = provenance(effective, l.seed);
  json j = res.to_json();
  j["provenance"] = prov.to_json();
  if (opts.format == "json") {
    const fs::path path = opts.out / "energy_sweep.json";
    write_json(path, j);
    return {path};
  }
  std::ostringstream os;
  os.precision(12);
  os << prov.comment_line() << "seed,level,ratio,zero_datum\n";
  for (const auto& r : res.rows) os << r.seed << ',' << r.level << ',' << r.ratio << ',' << r.zero_datum << '\n';
  const fs::path path = opts.out / "energy_sweep.csv";
  write_text(path, os.str());
  return {path};
}

}  // namespace wplap::cli
