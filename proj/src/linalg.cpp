#include "wplap/linalg.hpp"

#include "wplap/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wplap {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::not_positive_definite: return "not_positive_definite";
    case ErrorKind::degenerate_quadrature: return "degenerate_quadrature";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::domain: return "domain";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::mesh: return "mesh";
    case ErrorKind::assembly: return "assembly";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::stall: return "stall";
    case ErrorKind::inconsistency: return "inconsistency";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

bool is_finite(const Mat& m) { return m.allFinite(); }

namespace {

double off_diagonal_sq(const Mat& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return s;
}

}  // namespace

SymEigen jacobi_eigen(const Mat& input) {
  require(input.rows() == input.cols() && input.rows() >= 1,
          ErrorKind::invalid_input, "jacobi_eigen: matrix must be square");
  require(is_finite(input), ErrorKind::invalid_input,
          "jacobi_eigen: non-finite entries");
  const Eigen::Index n = input.rows();
  Mat a = 0.5 * (input + input.transpose());
  Mat v = Mat::Identity(n, n);

  const double scale = a.squaredNorm();
  for (int sweep = 0; sweep < 64; ++sweep) {
    if (off_diagonal_sq(a) <= 1e-32 * scale) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation annihilating a(p,q).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return SymEigen{a.diagonal(), v};
}

SpdMatrix::SpdMatrix(const Mat& entries) {
  require(entries.rows() == entries.cols() && entries.rows() >= 1 && entries.rows() <= 3,
          ErrorKind::invalid_input, "SpdMatrix: expected a square matrix of size 1..3");
  require(is_finite(entries), ErrorKind::invalid_input, "SpdMatrix: non-finite entries");
  const double max_abs = entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * max_abs, ErrorKind::invalid_input, "SpdMatrix: matrix is not symmetric");
  m_ = 0.5 * (entries + entries.transpose());
  eig_ = jacobi_eigen(m_);
  if (!(eig_.values.minCoeff() > 0.0)) {
    raise(ErrorKind::not_positive_definite,
          "SpdMatrix: smallest eigenvalue " + std::to_string(eig_.values.minCoeff()) + " <= 0");
  }
}

SpdMatrix SpdMatrix::identity(int dim) { return SpdMatrix(Mat::Identity(dim, dim)); }

SpdMatrix SpdMatrix::diagonal(const VecN& diag) {
  Mat m = Mat::Zero(diag.size(), diag.size());
  m.diagonal() = diag;
  return SpdMatrix(m);
}

SpdMatrix SpdMatrix::inverse() const {
  const Mat inv = spectral_apply(eig_, [](double l) { return 1.0 / l; });
  SymEigen e{eig_.values.cwiseInverse(), eig_.vectors};
  return SpdMatrix(0.5 * (inv + inv.transpose()), e);
}

SpdMatrix SpdMatrix::squared() const {
  const Mat sq = spectral_apply(eig_, [](double l) { return l * l; });
  SymEigen e{eig_.values.cwiseProduct(eig_.values), eig_.vectors};
  return SpdMatrix(0.5 * (sq + sq.transpose()), e);
}

SpdMatrix SpdMatrix::scaled(double c) const {
  require(c > 0.0 && std::isfinite(c), ErrorKind::invalid_input, "SpdMatrix::scaled: factor must be positive");
  SymEigen e{c * eig_.values, eig_.vectors};
  return SpdMatrix(c * m_, e);
}

double spectral_norm(const SpdMatrix& m) { return m.max_eigenvalue(); }

double sym_spectral_norm(const Mat& s) {
  if (s.rows() == 2) {
    // Closed form for 2x2 symmetric: |mean| + radius.
    const double a = s(0, 0), d = s(1, 1), b = 0.5 * (s(0, 1) + s(1, 0));
    const double mean = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), b);
    return std::abs(mean) + rad;
  }
  return jacobi_eigen(s).values.cwiseAbs().maxCoeff();
}

double operator_norm(const Mat& a) {
  require(is_finite(a), ErrorKind::invalid_input, "operator_norm: non-finite entries");
  const Mat ata = a.transpose() * a;
  return std::sqrt(std::max(0.0, jacobi_eigen(ata).values.maxCoeff()));
}

Mat matrix_log(const SpdMatrix& m) {
  return spectral_apply(m.eigen(), [](double l) { return std::log(l); });
}

Mat matrix_log(const Mat& s) {
  const SymEigen e = jacobi_eigen(s);
  if (!(e.values.minCoeff() > 0.0)) {
    raise(ErrorKind::not_positive_definite,
          "matrix_log: eigenvalue " + std::to_string(e.values.minCoeff()) + " <= 0");
  }
  return spectral_apply(e, [](double l) { return std::log(l); });
}

SpdMatrix matrix_exp(const Mat& s) {
  require(is_finite(s), ErrorKind::invalid_input, "matrix_exp: non-finite entries");
  const double max_abs = s.cwiseAbs().maxCoeff();
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * std::max(max_abs, 1.0), ErrorKind::invalid_input,
          "matrix_exp: input is not symmetric");
  const SymEigen e = jacobi_eigen(s);
  const Mat out = spectral_apply(e, [](double l) { return std::exp(l); });
  return SpdMatrix(0.5 * (out + out.transpose()));
}

}  // namespace wplap
