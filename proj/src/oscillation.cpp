#include "wplap/oscillation.hpp"

#include "wplap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace wplap {

BallSampler::BallSampler(Config config) {
  require(config.max_radius > 0.0, ErrorKind::invalid_input, "BallSampler: max_radius must be positive");
  require(config.levels >= 0 && config.grid >= 0 && config.random_count >= 0, ErrorKind::invalid_input,
          "BallSampler: negative counts");
  require((config.hi - config.lo).minCoeff() >= 0.0, ErrorKind::invalid_input, "BallSampler: empty box");
  max_radius_ = config.max_radius;
  seed_ = config.seed;

  std::vector<Vec2> centers;
  const auto keep = [&](const Vec2& c) {
    if (!config.region || config.region(c)) centers.push_back(c);
  };
  if (config.grid == 1) {
    keep(0.5 * (config.lo + config.hi));
  } else {
    for (int j = 0; j < config.grid; ++j)
      for (int i = 0; i < config.grid; ++i) {
        const double tx = static_cast<double>(i) / (config.grid - 1);
        const double ty = static_cast<double>(j) / (config.grid - 1);
        keep(Vec2(config.lo.x() + tx * (config.hi.x() - config.lo.x()),
                  config.lo.y() + ty * (config.hi.y() - config.lo.y())));
      }
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> ux(config.lo.x(), config.hi.x());
  std::uniform_real_distribution<double> uy(config.lo.y(), config.hi.y());
  for (int k = 0; k < config.random_count; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    keep(Vec2(x, y));
  }
  for (const auto& c : centers)
    for (int level = 0; level <= config.levels; ++level)
      balls_.emplace_back(c, config.max_radius / std::ldexp(1.0, level));

  provenance_ = {{"sampler", "grid+random"},
                 {"seed", config.seed},
                 {"box", {config.lo.x(), config.lo.y(), config.hi.x(), config.hi.y()}},
                 {"max_radius", config.max_radius},
                 {"levels", config.levels},
                 {"grid", config.grid},
                 {"random_count", config.random_count},
                 {"region_filtered", static_cast<bool>(config.region)},
                 {"ball_count", balls_.size()}};
}

BallSampler BallSampler::from_balls(std::vector<Ball> balls, std::uint64_t seed) {
  BallSampler s;
  s.balls_ = std::move(balls);
  s.seed_ = seed;
  for (const auto& b : s.balls_) s.max_radius_ = std::max(s.max_radius_, b.radius);
  s.provenance_ = {{"sampler", "explicit"}, {"seed", seed}, {"ball_count", s.balls_.size()}};
  return s;
}

void OscillationReport::finalize() {
  sup = 0.0;
  for (const auto& r : rows) sup = std::max(sup, r.value);
}

nlohmann::json OscillationReport::to_json() const {
  nlohmann::json balls = nlohmann::json::array();
  for (const auto& r : rows) {
    balls.push_back({{"cx", r.ball.center.x()},
                     {"cy", r.ball.center.y()},
                     {"r", r.ball.radius},
                     {"value", r.value},
                     {"clipped", r.clipped}});
  }
  return {{"quantity", quantity},
          {"sup_estimate", sup},
          {"ball_count", rows.size()},
          {"provenance", provenance},
          {"balls", balls}};
}

std::string OscillationReport::csv_header() { return "quantity,sup_estimate,ball_count,seed"; }

std::string OscillationReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << quantity << ',' << sup << ',' << rows.size() << ','
     << (provenance.contains("seed") ? provenance["seed"].get<std::uint64_t>() : 0);
  return os.str();
}

double conjugate_exponent(double p) {
  require(std::isfinite(p) && p >= 1.0 + 1e-6, ErrorKind::domain, "exponent p must satisfy p >= 1 + 1e-6");
  const long double pl = p;
  return static_cast<double>(pl / (pl - 1.0L));
}

double log_oscillation(const MatrixWeightField& field, const BallNodes& nodes) {
  std::vector<Mat> logs;
  logs.reserve(nodes.size());
  for (const auto& x : nodes.points) logs.push_back(matrix_log(field(x)));
  const Mat mean = node_mean(nodes, logs);
  double s = 0.0;
  for (std::size_t k = 0; k < logs.size(); ++k) s += nodes.weights[k] * sym_spectral_norm(logs[k] - mean);
  return s / nodes.total_weight;
}

double log_oscillation(const ScalarWeight& weight, const BallNodes& nodes) {
  std::vector<double> logs;
  logs.reserve(nodes.size());
  for (const auto& x : nodes.points) {
    const double w = weight(x);
    require(w > 0.0 && std::isfinite(w), ErrorKind::invalid_input, "log_oscillation: weight must be positive");
    logs.push_back(std::log(w));
  }
  const double mean = node_mean(nodes, logs);
  double s = 0.0;
  for (std::size_t k = 0; k < logs.size(); ++k) s += nodes.weights[k] * std::abs(logs[k] - mean);
  return s / nodes.total_weight;
}

double muckenhoupt_bracket(const ScalarWeight& weight, double p, const BallNodes& nodes) {
  const double pc = conjugate_exponent(p);
  double sp = 0.0, sm = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double w = weight(nodes.points[k]);
    sp += nodes.weights[k] * std::pow(w, p);
    sm += nodes.weights[k] * std::pow(w, -pc);
  }
  const double value = std::pow(sp / nodes.total_weight, 1.0 / p) * std::pow(sm / nodes.total_weight, 1.0 / pc);
  if (!std::isfinite(value) || !std::isfinite(sp) || !std::isfinite(sm)) {
    std::ostringstream os;
    os << "Muckenhoupt bracket overflow on ball center (" << nodes.ball.center.x() << ", "
       << nodes.ball.center.y() << ") radius " << nodes.ball.radius;
    throw OverflowError(nodes.ball, os.str());
  }
  return value;
}

CmpValues cmp_on_ball(const MatrixWeightField& a_field, const BallNodes& nodes) {
  std::vector<Mat> as;
  std::vector<double> mus;
  as.reserve(nodes.size());
  mus.reserve(nodes.size());
  double mu_b = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const SpdMatrix a = a_field(nodes.points[k]);
    as.push_back(a.mat());
    mus.push_back(spectral_norm(a));
    mu_b += nodes.weights[k] * mus.back();
  }
  const Mat mean = node_mean(nodes, as);
  double s2 = 0.0, s1 = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double d = sym_spectral_norm(as[k] - mean);
    s2 += nodes.weights[k] * d * d / mus[k];
    s1 += nodes.weights[k] * d;
  }
  return {std::sqrt(s2 / mu_b), s1 / mu_b};
}

namespace {

template <class PerBall>
OscillationReport run_over_balls(const std::string& name, const BallSampler& sampler,
                                 const OscillationOptions& opts, const std::vector<Vec2>& anchors,
                                 PerBall&& per_ball) {
  const auto& balls = sampler.balls();
  require(!balls.empty(), ErrorKind::invalid_input, "oscillation: sampler produced no balls");
  std::vector<std::optional<BallValue>> slots(balls.size());
  parallel_for(balls.size(), opts.threads, [&](std::size_t i) {
    const BallNodes nodes = ball_nodes(balls[i], opts.quad, anchors, opts.clip);
    slots[i] = BallValue{balls[i], per_ball(nodes), nodes.clipped};
  });
  OscillationReport rep;
  rep.quantity = name;
  rep.rows.reserve(slots.size());
  for (auto& s : slots) rep.rows.push_back(*s);
  rep.provenance = sampler.provenance();
  rep.provenance["quadrature_cells"] = opts.quad.cells;
  rep.provenance["clipped_to_region"] = static_cast<bool>(opts.clip);
  rep.finalize();
  return rep;
}

}  // namespace

OscillationReport bmo_seminorm(const MatrixWeightField& field, const BallSampler& sampler,
                               const OscillationOptions& opts) {
  return run_over_balls("log_bmo_matrix", sampler, opts, field.singular_anchors(),
                        [&](const BallNodes& n) { return log_oscillation(field, n); });
}

OscillationReport bmo_seminorm(const ScalarWeight& weight, const std::vector<Vec2>& anchors,
                               const BallSampler& sampler, const OscillationOptions& opts) {
  return run_over_balls("log_bmo_scalar", sampler, opts, anchors,
                        [&](const BallNodes& n) { return log_oscillation(weight, n); });
}

OscillationReport muckenhoupt_constant(const ScalarWeight& weight, const std::vector<Vec2>& anchors, double p,
                                       const BallSampler& sampler, const OscillationOptions& opts) {
  conjugate_exponent(p);
  auto rep = run_over_balls("muckenhoupt_bracket", sampler, opts, anchors,
                            [&](const BallNodes& n) { return muckenhoupt_bracket(weight, p, n); });
  rep.provenance["p"] = p;
  return rep;
}

CmpReports cmp_quantities(const MatrixWeightField& a_field, const BallSampler& sampler,
                          const OscillationOptions& opts) {
  const auto& balls = sampler.balls();
  require(!balls.empty(), ErrorKind::invalid_input, "cmp_quantities: sampler produced no balls");
  std::vector<std::optional<std::pair<BallValue, BallValue>>> slots(balls.size());
  parallel_for(balls.size(), opts.threads, [&](std::size_t i) {
    const BallNodes nodes = ball_nodes(balls[i], opts.quad, a_field.singular_anchors(), opts.clip);
    const CmpValues v = cmp_on_ball(a_field, nodes);
    slots[i] = std::pair{BallValue{balls[i], v.bmo2_mu, nodes.clipped}, BallValue{balls[i], v.bmo_mu, nodes.clipped}};
  });
  CmpReports out;
  out.bmo2_mu.quantity = "bmo2_mu";
  out.bmo_mu.quantity = "bmo_mu";
  for (auto& s : slots) {
    out.bmo2_mu.rows.push_back(s->first);
    out.bmo_mu.rows.push_back(s->second);
  }
  out.bmo2_mu.provenance = out.bmo_mu.provenance = sampler.provenance();
  out.bmo2_mu.finalize();
  out.bmo_mu.finalize();
  return out;
}

LogWeakestVerdict check_log_weakest(const MatrixWeightField& a_field, const Ball& ball, const QuadratureSpec& quad,
                                    const Region& clip, double slack) {
  const BallNodes nodes = ball_nodes(ball, quad, a_field.singular_anchors(), clip);
  double norm_a = 0.0, norm_inv = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const SpdMatrix a = a_field(nodes.points[k]);
    norm_a += nodes.weights[k] * a.max_eigenvalue();
    norm_inv += nodes.weights[k] / a.min_eigenvalue();
  }
  norm_a /= nodes.total_weight;
  norm_inv /= nodes.total_weight;
  const double lhs = log_oscillation(a_field, nodes);
  const double bmo2 = cmp_on_ball(a_field, nodes).bmo2_mu;
  const double rhs = 4.0 * norm_a * norm_inv * bmo2;
  return {lhs, rhs, rhs - lhs, norm_a, norm_inv, bmo2, lhs <= rhs + slack};
}

LinearControlRecord check_linear_control(const MatrixWeightField& a_field, const Ball& ball, double delta,
                                         const QuadratureSpec& quad, const Region& clip) {
  const BallNodes nodes = ball_nodes(ball, quad, a_field.singular_anchors(), clip);
  const double log_bmo = log_oscillation(a_field, nodes);
  const double bmo2 = cmp_on_ball(a_field, nodes).bmo2_mu;
  LinearControlRecord rec{bmo2, log_bmo, std::nullopt, log_bmo <= delta};
  if (log_bmo > 0.0) rec.ratio = bmo2 / log_bmo;
  return rec;
}

VanishingResult vanishing_check(const MatrixWeightField& field, double delta, const BallSampler& sampler,
                                const OscillationOptions& opts) {
  auto rep = bmo_seminorm(field, sampler, opts);
  rep.provenance["delta"] = delta;
  const bool ok = rep.sup <= delta;
  return {ok, std::move(rep)};
}

double log_mean_deviation(const MatrixWeightField& field, double t, const BallNodes& nodes) {
  require(t >= 1.0, ErrorKind::domain, "log_mean_deviation: t must be >= 1");
  const SpdMatrix lm = log_mean(field, nodes);
  const double scale = spectral_norm(lm);
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double d = sym_spectral_norm(field(nodes.points[k]).mat() - lm.mat()) / scale;
    s += nodes.weights[k] * std::pow(d, t);
  }
  return std::pow(s / nodes.total_weight, 1.0 / t);
}

OscillationReport john_nirenberg_report(const MatrixWeightField& field, double t, const BallSampler& sampler,
                                        const OscillationOptions& opts) {
  auto rep = run_over_balls("john_nirenberg_ratio", sampler, opts, field.singular_anchors(),
                            [&](const BallNodes& n) {
                              const double osc = log_oscillation(field, n);
                              const double dev = log_mean_deviation(field, t, n);
                              if (osc <= 0.0) return 0.0;
                              return dev / (t * osc);
                            });
  rep.provenance["t"] = t;
  return rep;
}

}  // namespace wplap
