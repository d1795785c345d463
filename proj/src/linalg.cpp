#include "mincerlab/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "mincerlab/errors.hpp"

namespace mincer {

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix multiply: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += ail * b(l, j);
    }
  }
  return c;
}

std::vector<double> multiply(const Matrix& a, const std::vector<double>& x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector multiply: shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

HouseholderQr::HouseholderQr(Matrix a) : qr_(std::move(a)) {
  const std::size_t m = qr_.rows();
  const std::size_t n = qr_.cols();
  if (m < n) throw InsufficientDataError("QR factorization requires rows >= cols");
  rdiag_.assign(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    double nrm = 0.0;
    for (std::size_t i = k; i < m; ++i) nrm = std::hypot(nrm, qr_(i, k));

    if (nrm != 0.0) {
      if (qr_(k, k) < 0.0) nrm = -nrm;
      for (std::size_t i = k; i < m; ++i) qr_(i, k) /= nrm;
      qr_(k, k) += 1.0;
      for (std::size_t j = k + 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += qr_(i, k) * qr_(i, j);
        s = -s / qr_(k, k);
        for (std::size_t i = k; i < m; ++i) qr_(i, j) += s * qr_(i, k);
      }
    }
    rdiag_[k] = -nrm;
  }
}

std::vector<std::size_t> HouseholderQr::deficient_columns(double rel_tol) const {
  double max_diag = 0.0;
  for (double d : rdiag_) max_diag = std::max(max_diag, std::fabs(d));
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < rdiag_.size(); ++j) {
    if (std::fabs(rdiag_[j]) < rel_tol * max_diag || rdiag_[j] == 0.0) out.push_back(j);
  }
  return out;
}

std::vector<double> HouseholderQr::solve(const std::vector<double>& y) const {
  const std::size_t m = qr_.rows();
  const std::size_t n = qr_.cols();
  if (y.size() != m) throw std::invalid_argument("QR solve: response length mismatch");
  for (double d : rdiag_) {
    if (d == 0.0) throw std::runtime_error("QR solve: zero diagonal in R");
  }

  // Apply the stored reflectors to y, i.e. compute Q^T y.
  std::vector<double> q = y;
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = k; i < m; ++i) s += qr_(i, k) * q[i];
    s = -s / qr_(k, k);
    for (std::size_t i = k; i < m; ++i) q[i] += s * qr_(i, k);
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    double v = q[k];
    for (std::size_t j = k + 1; j < n; ++j) v -= qr_(k, j) * x[j];
    x[k] = v / rdiag_[k];
  }
  return x;
}

Matrix HouseholderQr::xtx_inverse() const {
  const std::size_t n = qr_.cols();
  for (double d : rdiag_) {
    if (d == 0.0) throw std::runtime_error("xtx_inverse: zero diagonal in R");
  }

  // Invert the upper-triangular R column by column.
  Matrix rinv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    rinv(c, c) = 1.0 / rdiag_[c];
    for (std::size_t i = c; i-- > 0;) {
      double s = 0.0;
      for (std::size_t j = i + 1; j <= c; ++j) s += qr_(i, j) * rinv(j, c);
      rinv(i, c) = -s / rdiag_[i];
    }
  }

  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t l = i; l < n; ++l) s += rinv(i, l) * rinv(j, l);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

SymmetricEigen symmetric_eigen(Matrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigen: matrix must be square");
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a(i, i)));
    if (std::sqrt(off) <= 1e-14 * std::max(scale, 1e-300)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a(p, i);
          const double aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  out.vectors = std::move(v);
  return out;
}

Matrix symmetric_pseudo_inverse(const Matrix& a, double rel_tol, std::size_t* rank_out) {
  SymmetricEigen eig = symmetric_eigen(a);
  const std::size_t n = a.rows();
  double max_abs = 0.0;
  for (double l : eig.values) max_abs = std::max(max_abs, std::fabs(l));

  std::size_t rank = 0;
  std::vector<double> inv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(eig.values[i]) > rel_tol * max_abs && eig.values[i] != 0.0) {
      inv[i] = 1.0 / eig.values[i];
      ++rank;
    }
  }
  if (rank_out) *rank_out = rank;

  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += eig.vectors(i, l) * inv[l] * eig.vectors(j, l);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

}  // namespace mincer
