#include "wplap/analysis.hpp"

#include "wplap/error.hpp"
#include "wplap/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace wplap {

namespace {

// Half-width (in cells) of each row of the discrete disk of radius r.
std::vector<int> disk_rows(double r, double h) {
  const double rr = r / h;
  const int big = static_cast<int>(std::floor(rr + 1e-9));
  std::vector<int> w(2 * static_cast<std::size_t>(big) + 1);
  for (int dy = -big; dy <= big; ++dy) {
    w[dy + big] = static_cast<int>(std::floor(std::sqrt(std::max(0.0, rr * rr - dy * dy)) + 1e-9));
  }
  return w;
}

// Row prefix sums: prefix[j][i] = sum of g over cells 0..i-1 of row j.
std::vector<std::vector<double>> row_prefix(const GridFunction& f, const std::function<double(double)>& g) {
  std::vector<std::vector<double>> p(f.ny(), std::vector<double>(f.nx() + 1, 0.0));
  for (int j = 0; j < f.ny(); ++j) {
    for (int i = 0; i < f.nx(); ++i) p[j][i + 1] = p[j][i] + g(f.at(i, j));
  }
  return p;
}

struct DiskSum {
  double sum = 0.0;
  long long in_grid = 0;
  long long total = 0;
};

DiskSum disk_sum(const std::vector<std::vector<double>>& prefix, const std::vector<int>& rows, int ci, int cj,
                 int nx, int ny) {
  DiskSum s;
  const int big = static_cast<int>(rows.size() / 2);
  for (int dy = -big; dy <= big; ++dy) {
    const int w = rows[dy + big];
    s.total += 2 * w + 1;
    const int j = cj + dy;
    if (j < 0 || j >= ny) continue;
    const int i0 = std::max(0, ci - w), i1 = std::min(nx - 1, ci + w);
    if (i0 > i1) continue;
    s.sum += prefix[j][i1 + 1] - prefix[j][i0];
    s.in_grid += i1 - i0 + 1;
  }
  return s;
}

void check_rho(double rho) {
  require(std::isfinite(rho) && rho >= 1.0, ErrorKind::invalid_input, "maximal operators need rho >= 1");
}

}  // namespace

GridFunction::GridFunction(const Vec2& lo, double spacing, int nx, int ny)
    : lo_(lo), h_(spacing), nx_(nx), ny_(ny),
      values_(static_cast<std::size_t>(std::max(nx, 0)) * std::max(ny, 0), 0.0),
      inside_(values_.size(), 1) {
  require(spacing > 0.0 && nx > 0 && ny > 0, ErrorKind::invalid_input, "GridFunction: need positive size");
}

GridFunction GridFunction::over_domain(const PolygonalDomain& domain, double spacing,
                                       const std::function<double(const Vec2&)>& f, int pad) {
  const auto [lo, hi] = domain.bounding_box();
  const int nx = static_cast<int>(std::ceil((hi.x() - lo.x()) / spacing - 1e-9)) + 2 * pad;
  const int ny = static_cast<int>(std::ceil((hi.y() - lo.y()) / spacing - 1e-9)) + 2 * pad;
  GridFunction g(lo - pad * spacing * Vec2::Ones(), spacing, std::max(nx, 1), std::max(ny, 1));
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 c = g.center(i, j);
      const bool in = domain.contains(c);
      g.set_inside(i, j, in);
      const double v = in ? f(c) : 0.0;
      require(std::isfinite(v), ErrorKind::invalid_input, "GridFunction: non-finite sample");
      g.at(i, j) = v;
    }
  }
  return g;
}

GridFunction& GridFunction::operator*=(double c) {
  for (auto& v : values_) v *= c;
  return *this;
}

GridFunction& GridFunction::operator+=(double c) {
  for (auto& v : values_) v += c;
  return *this;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require(other.nx_ == nx_ && other.ny_ == ny_, ErrorKind::invalid_input, "GridFunction: shape mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

GridFunction GridFunction::same_shape() const {
  GridFunction g(lo_, h_, nx_, ny_);
  g.inside_ = inside_;
  g.zero_extension_ = zero_extension_;
  return g;
}

std::vector<double> dyadic_radii(const GridFunction& f) {
  const double diameter = f.spacing() * std::hypot(f.nx(), f.ny());
  std::vector<double> radii;
  for (double r = 0.5 * f.spacing();; r *= 2.0) {
    radii.push_back(r);
    if (r >= diameter) break;
  }
  return radii;
}

GridFunction maximal(const GridFunction& f, double rho, int threads) {
  check_rho(rho);
  const auto prefix = row_prefix(f, [rho](double v) { return std::pow(std::abs(v), rho); });
  std::vector<std::vector<int>> disks;
  for (double r : dyadic_radii(f)) disks.push_back(disk_rows(r, f.spacing()));
  GridFunction out = f.same_shape();
  const int nx = f.nx(), ny = f.ny();
  parallel_for(static_cast<std::size_t>(ny), threads, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < nx; ++i) {
      double best = 0.0;
      for (const auto& rows : disks) {
        const DiskSum s = disk_sum(prefix, rows, i, j, nx, ny);
        const auto count = f.zero_extension() ? s.total : s.in_grid;
        best = std::max(best, s.sum / static_cast<double>(count));
      }
      out.at(i, j) = std::pow(best, 1.0 / rho);
    }
  });
  return out;
}

GridFunction sharp_maximal(const GridFunction& f, double rho, int threads) {
  check_rho(rho);
  const auto prefix = row_prefix(f, [](double v) { return v; });
  std::vector<std::vector<int>> disks;
  for (double r : dyadic_radii(f)) disks.push_back(disk_rows(r, f.spacing()));
  GridFunction out = f.same_shape();
  const int nx = f.nx(), ny = f.ny();
  parallel_for(static_cast<std::size_t>(ny), threads, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < nx; ++i) {
      double best = 0.0;
      for (const auto& rows : disks) {
        const DiskSum s = disk_sum(prefix, rows, i, j, nx, ny);
        const auto count = f.zero_extension() ? s.total : s.in_grid;
        const double mean = s.sum / static_cast<double>(count);
        // Cells beyond the grid are zeros of the extension.
        double osc = f.zero_extension() ? static_cast<double>(s.total - s.in_grid) * std::pow(std::abs(mean), rho) : 0.0;
        const int big = static_cast<int>(rows.size() / 2);
        for (int dy = -big; dy <= big; ++dy) {
          const int jr = j + dy;
          if (jr < 0 || jr >= ny) continue;
          const int w = rows[dy + big];
          const int i0 = std::max(0, i - w), i1 = std::min(nx - 1, i + w);
          for (int ir = i0; ir <= i1; ++ir) osc += std::pow(std::abs(f.at(ir, jr) - mean), rho);
        }
        best = std::max(best, osc / static_cast<double>(count));
      }
      out.at(i, j) = std::pow(best, 1.0 / rho);
    }
  });
  return out;
}

double lq_norm(const GridFunction& f, double q) {
  require(q >= 1.0 && std::isfinite(q), ErrorKind::invalid_input, "lq_norm: q must be >= 1");
  long double s = 0.0L;
  for (double v : f.values()) s += std::pow(std::abs(static_cast<long double>(v)), static_cast<long double>(q));
  return static_cast<double>(std::pow(s * f.cell_area(), 1.0L / q));
}

FeffermanSteinResult fefferman_stein_ratio(const GridFunction& f, double q, int threads) {
  require(q > 1.0, ErrorKind::invalid_input, "fefferman_stein_ratio: q must exceed 1");
  FeffermanSteinResult r;
  r.norm_f = lq_norm(f, q);
  r.norm_sharp = lq_norm(sharp_maximal(f, 1.0, threads), q);
  if (r.norm_sharp == 0.0) {
    r.degenerate = true;
    return r;
  }
  r.ratio = r.norm_f / (q * r.norm_sharp);
  return r;
}

double weighted_lq_norm(const DiscreteVectorField& field, const ScalarFn& omega, double q, const Region& region) {
  field.validate();
  require(q >= 1.0 && std::isfinite(q), ErrorKind::invalid_input, "weighted_lq_norm: q must be >= 1");
  const Mesh& mesh = *field.mesh;
  long double s = 0.0L;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 c = mesh.centroid(t);
    if (region && !region(c)) continue;
    const double w = omega ? omega(c) : 1.0;
    const long double term = std::pow(static_cast<long double>(field.values[t].norm()) * w, static_cast<long double>(q)) *
                             mesh.triangle_area(t);
    if (!std::isfinite(static_cast<double>(term))) {
      raise(ErrorKind::overflow, "weighted_lq_norm: overflow at element " + std::to_string(t));
    }
    s += term;
  }
  return static_cast<double>(std::pow(s, 1.0L / q));
}

double weighted_lq_norm(const GridFunction& f, const ScalarFn& omega, double q, const Region& region) {
  require(q >= 1.0 && std::isfinite(q), ErrorKind::invalid_input, "weighted_lq_norm: q must be >= 1");
  long double s = 0.0L;
  for (int j = 0; j < f.ny(); ++j) {
    for (int i = 0; i < f.nx(); ++i) {
      const Vec2 c = f.center(i, j);
      if (region && !region(c)) continue;
      const double w = omega ? omega(c) : 1.0;
      const long double term = std::pow(static_cast<long double>(std::abs(f.at(i, j))) * w, static_cast<long double>(q));
      if (!std::isfinite(static_cast<double>(term))) {
        raise(ErrorKind::overflow,
              "weighted_lq_norm: overflow at cell (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      s += term;
    }
  }
  return static_cast<double>(std::pow(s * f.cell_area(), 1.0L / q));
}

ScalarFn weight_norm_fn(const MatrixWeightField& m) {
  return [m](const Vec2& x) { return spectral_norm(m(x)); };
}

CzRatio cz_ratio(const DiscreteScalarField& u, const DiscreteVectorField& f, const ScalarFn& omega, double q) {
  require(q > 1.0, ErrorKind::invalid_input, "cz_ratio: q must exceed 1");
  const double num = weighted_lq_norm(gradient(u), omega, q);
  const double den = weighted_lq_norm(f, omega, q);
  if (den == 0.0) {
    if (num != 0.0) raise(ErrorKind::inconsistency, "cz_ratio: datum vanishes but the solution does not");
    return CzRatio{0.0, true};
  }
  return CzRatio{num / den, false};
}

GridFunction resample(const DiscreteScalarField& u, const GridFunction& shape) {
  u.validate();
  const PointLocator loc(*u.mesh);
  GridFunction g = shape.same_shape();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const auto hit = loc.locate(g.center(i, j));
      if (!hit) continue;
      const auto& tri = u.mesh->triangles[hit->triangle];
      double v = 0.0;
      for (int a = 0; a < 3; ++a) v += hit->barycentric[a] * u.values(tri[a]);
      g.at(i, j) = v;
    }
  }
  return g;
}

GridFunction resample_magnitude(const DiscreteVectorField& f, const GridFunction& shape) {
  f.validate();
  const PointLocator loc(*f.mesh);
  GridFunction g = shape.same_shape();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const auto hit = loc.locate(g.center(i, j));
      if (hit) g.at(i, j) = f.values[hit->triangle].norm();
    }
  }
  return g;
}

}  // namespace wplap
