#pragma once

#include <cstddef>
#include <vector>

namespace mincer {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, const std::vector<double>& x);

/// Householder QR factorization of a tall matrix (rows >= cols), stored in
/// the compact layout: reflectors below the diagonal, R strictly above it,
/// R's diagonal in a side vector.
class HouseholderQr {
 public:
  explicit HouseholderQr(Matrix a);

  std::size_t rows() const { return qr_.rows(); }
  std::size_t cols() const { return qr_.cols(); }

  /// Indices of columns whose |R_jj| falls below rel_tol * max_i |R_ii|.
  std::vector<std::size_t> deficient_columns(double rel_tol) const;
  bool full_rank(double rel_tol) const { return deficient_columns(rel_tol).empty(); }

  /// Least-squares solution of min ||y - A x||. The factorization must have
  /// a nonzero R diagonal; callers are expected to rank-check first.
  std::vector<double> solve(const std::vector<double>& y) const;

  /// (A^T A)^{-1} computed as R^{-1} R^{-T}.
  Matrix xtx_inverse() const;

  const std::vector<double>& r_diagonal() const { return rdiag_; }

 private:
  Matrix qr_;
  std::vector<double> rdiag_;
};

struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;  // columns are eigenvectors, aligned with values
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
SymmetricEigen symmetric_eigen(Matrix a);

/// Moore-Penrose pseudo-inverse of a symmetric matrix. Eigenvalues with
/// |lambda| <= rel_tol * max|lambda| are treated as zero; rank_out, when
/// non-null, receives the count of retained eigenvalues.
Matrix symmetric_pseudo_inverse(const Matrix& a, double rel_tol, std::size_t* rank_out = nullptr);

}  // namespace mincer
