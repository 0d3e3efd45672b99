#include "wplap/corner.hpp"

#include "wplap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace wplap {

namespace {

struct GaussRule {
  std::vector<double> x;  // nodes on (-1, 1)
  std::vector<double> w;
};

// Gauss-Legendre nodes by Newton iteration on P_n.
GaussRule gauss_legendre(int n) {
  GaussRule g{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.x[i] = x;
    g.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

const GaussRule& radial_rule() {
  static const GaussRule rule = gauss_legendre(24);
  return rule;
}

const GaussRule& angular_rule() {
  static const GaussRule rule = gauss_legendre(32);
  return rule;
}

}  // namespace

CornerSolution::CornerSolution(double eps) : eps_(eps) {
  require(std::isfinite(eps) && eps > 0.0 && eps <= 1.0, ErrorKind::domain,
          "corner solution: epsilon must lie in (0, 1]");
  theta0_ = std::atan(eps);
  alpha_ = (0.5 * std::numbers::pi) / (0.5 * std::numbers::pi + theta0_);
}

double CornerSolution::critical_q() const { return 2.0 + std::numbers::pi / theta0_; }

double CornerSolution::polar_angle(const Vec2& x) {
  double phi = std::atan2(x.y(), x.x());
  if (phi < -0.5 * std::numbers::pi) phi += 2.0 * std::numbers::pi;
  return phi;
}

bool CornerSolution::in_sector(const Vec2& x) const {
  return x.norm() < 1.0 && x.y() > -eps_ * std::abs(x.x());
}

double CornerSolution::value(const Vec2& x) const {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  return std::cos(alpha_ * (polar_angle(x) - 0.5 * std::numbers::pi)) * std::pow(r, alpha_);
}

Vec2 CornerSolution::gradient(const Vec2& x) const {
  const double r = x.norm();
  require(r > 0.0, ErrorKind::domain, "corner solution: gradient is singular at the origin");
  const double phi = polar_angle(x);
  const double s = alpha_ * (phi - 0.5 * std::numbers::pi);
  const double g = alpha_ * std::pow(r, alpha_ - 1.0);
  const Vec2 er(std::cos(phi), std::sin(phi)), ephi(-std::sin(phi), std::cos(phi));
  return g * (std::cos(s) * er - std::sin(s) * ephi);
}

double CornerSolution::gradient_norm(double r) const { return alpha_ * std::pow(r, alpha_ - 1.0); }

CornerSolution corner_exact(double eps) { return CornerSolution(eps); }

double corner_gradient_power_integral(const CornerSolution& u, double q, double r0, double r1) {
  require(r0 > 0.0 && r1 > r0, ErrorKind::invalid_input, "corner integral: need 0 < r0 < r1");
  const auto& gr = radial_rule();
  const auto& ga = angular_rule();
  const double a0 = -u.ray_angle(), a1 = std::numbers::pi + u.ray_angle();
  long double total = 0.0L;
  // Dyadic pieces keep the power-law integrand smooth on each piece.
  for (double lo = r0; lo < r1;) {
    const double hi = std::min(2.0 * lo, r1);
    for (std::size_t i = 0; i < gr.x.size(); ++i) {
      const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gr.x[i];
      long double ring = 0.0L;
      for (std::size_t j = 0; j < ga.x.size(); ++j) {
        const double phi = 0.5 * (a0 + a1) + 0.5 * (a1 - a0) * ga.x[j];
        const Vec2 x(r * std::cos(phi), r * std::sin(phi));
        ring += ga.w[j] * std::pow(static_cast<long double>(u.gradient(x).norm()), static_cast<long double>(q));
      }
      total += 0.5L * (hi - lo) * gr.w[i] * r * 0.5L * (a1 - a0) * ring;
    }
    lo = hi;
  }
  return static_cast<double>(total);
}

nlohmann::json ThresholdFit::to_json() const {
  nlohmann::json cls = nlohmann::json::array();
  for (const auto& c : classes) {
    cls.push_back({{"q", c.q}, {"classification", c.divergent ? "divergent" : "convergent"}, {"score", c.score}});
  }
  nlohmann::json j{{"epsilon", epsilon},
                   {"q_star_analytic", q_star_analytic},
                   {"inconclusive", inconclusive},
                   {"classes", cls}};
  j["q_hat"] = inconclusive ? nlohmann::json(nullptr) : nlohmann::json(q_hat);
  return j;
}

std::string ThresholdFit::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "epsilon,q,annulus_k,norm,classification\n";
  for (const auto& r : rows) {
    const auto it = std::find_if(classes.begin(), classes.end(), [&](const QClassification& c) { return c.q == r.q; });
    os << epsilon << ',' << r.q << ',' << r.k << ',' << r.norm << ','
       << (it != classes.end() && it->divergent ? "divergent" : "convergent") << '\n';
  }
  return os.str();
}

ThresholdFit threshold_fit(double eps, const std::vector<double>& q_grid, const ThresholdConfig& config) {
  const CornerSolution u(eps);
  require(!q_grid.empty(), ErrorKind::invalid_input, "threshold_fit: empty q grid");
  require(config.k_min >= 1 && config.k_max >= config.k_min + 3, ErrorKind::invalid_input,
          "threshold_fit: need at least four annulus levels");
  std::vector<double> qs = q_grid;
  std::sort(qs.begin(), qs.end());
  for (double q : qs) require(q > 1.0 && std::isfinite(q), ErrorKind::invalid_input, "threshold_fit: q must exceed 1");

  ThresholdFit fit;
  fit.epsilon = eps;
  fit.q_star_analytic = u.critical_q();
  for (double q : qs) {
    std::vector<double> integral;
    double running = corner_gradient_power_integral(u, q, std::ldexp(1.0, -config.k_min), 1.0);
    integral.push_back(running);
    fit.rows.push_back(AnnulusRow{q, config.k_min, std::pow(running, 1.0 / q)});
    for (int k = config.k_min + 1; k <= config.k_max; ++k) {
      running += corner_gradient_power_integral(u, q, std::ldexp(1.0, -k), std::ldexp(1.0, -k + 1));
      integral.push_back(running);
      fit.rows.push_back(AnnulusRow{q, k, std::pow(running, 1.0 / q)});
    }
    // Relative Cauchy increments of the last three levels.
    double smallest = std::numeric_limits<double>::infinity();
    const std::size_t n = integral.size();
    for (std::size_t k = n - 3; k < n; ++k) {
      smallest = std::min(smallest, (integral[k] - integral[k - 1]) / integral[k]);
    }
    const double score = smallest - config.threshold;
    fit.classes.push_back(QClassification{q, score > 0.0, score});
  }

  std::size_t first_div = fit.classes.size();
  for (std::size_t i = 0; i < fit.classes.size(); ++i) {
    if (fit.classes[i].divergent) {
      first_div = i;
      break;
    }
  }
  if (first_div == 0 || first_div == fit.classes.size()) {
    fit.inconclusive = true;
    fit.q_hat = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const auto& a = fit.classes[first_div - 1];
  const auto& b = fit.classes[first_div];
  fit.q_hat = a.q + (b.q - a.q) * (-a.score) / (b.score - a.score);
  return fit;
}

std::vector<double> default_q_grid(double eps, int count) {
  const CornerSolution u(eps);
  const double hi = 2.0 + 2.0 * std::numbers::pi / u.ray_angle();
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[i] = 3.0 + (hi - 3.0) * i / (count - 1);
  return g;
}

OriginFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && !x.empty(), ErrorKind::invalid_input, "fit_through_origin: size mismatch");
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  require(sxx > 0.0, ErrorKind::invalid_input, "fit_through_origin: x is identically zero");
  OriginFit f;
  f.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += (y[i] - f.slope * x[i]) * (y[i] - f.slope * x[i]);
  f.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return f;
}

}  // namespace wplap
