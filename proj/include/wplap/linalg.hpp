#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace wplap {

// Small dense types. Matrices never exceed 3x3, so storage stays on the stack.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Vec2 = Eigen::Vector2d;

/// Eigen-pairs of a symmetric matrix; column k of `vectors` belongs to values(k).
struct SymEigen {
  VecN values;
  Mat vectors;
};

/// Cyclic Jacobi on the symmetrized input (A + A^T) / 2.
SymEigen jacobi_eigen(const Mat& a);

/// Symmetric positive-definite matrix, validated at construction.
class SpdMatrix {
public:
  /// Throws invalid_input for non-finite or asymmetric entries and
  /// not_positive_definite when the smallest eigenvalue is <= 0.
  explicit SpdMatrix(const Mat& entries);

  static SpdMatrix identity(int dim);
  static SpdMatrix diagonal(const VecN& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Eigen-decomposition computed once at construction.
  const SymEigen& eigen() const { return eig_; }
  double min_eigenvalue() const { return eig_.values.minCoeff(); }
  double max_eigenvalue() const { return eig_.values.maxCoeff(); }

  SpdMatrix inverse() const;
  SpdMatrix squared() const;
  SpdMatrix scaled(double c) const;

private:
  SpdMatrix(const Mat& entries, const SymEigen& eig) : m_(entries), eig_(eig) {}

  Mat m_;
  SymEigen eig_;
};

/// Spectral norm. For an SPD matrix this is the largest eigenvalue.
double spectral_norm(const SpdMatrix& m);

/// Spectral norm of a symmetric matrix: max |eigenvalue|.
double sym_spectral_norm(const Mat& s);

/// Spectral norm of an arbitrary square matrix, sqrt(lambda_max(A^T A)).
double operator_norm(const Mat& a);

/// Principal logarithm of an SPD matrix; result is symmetric.
Mat matrix_log(const SpdMatrix& m);

/// Logarithm of a general symmetric matrix; throws not_positive_definite
/// when some eigenvalue is <= 0.
Mat matrix_log(const Mat& s);

/// Exponential of a symmetric matrix (input is symmetrized first).
SpdMatrix matrix_exp(const Mat& s);

/// Applies f to the eigenvalues of the symmetric matrix s.
template <class F>
Mat spectral_apply(const SymEigen& e, F&& f) {
  const auto n = e.values.size();
  Mat out = Mat::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double fk = f(e.values(k));
    out.noalias() += fk * e.vectors.col(k) * e.vectors.col(k).transpose();
  }
  return out;
}

bool is_finite(const Mat& m);

}  // namespace wplap
