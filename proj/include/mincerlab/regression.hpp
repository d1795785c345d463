#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mincerlab/linalg.hpp"

namespace mincer {

/// Relative threshold on R's diagonal below which a design column is
/// reported as linearly dependent.
inline constexpr double kRankRelTol = 1e-10;

/// Numeric design matrix with named columns. Construction validates
/// n >= k >= 1, unique labels and the absence of non-finite entries;
/// instances are immutable afterwards.
class DesignMatrix {
 public:
  DesignMatrix(Matrix values, std::vector<std::string> labels);

  const Matrix& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t n() const { return values_.rows(); }
  std::size_t k() const { return values_.cols(); }

  /// Index of a labeled column; throws std::invalid_argument when absent.
  std::size_t column_index(const std::string& label) const;
  std::vector<double> column(std::size_t j) const;

  DesignMatrix without_column(std::size_t j) const;
  DesignMatrix with_column_replaced(std::size_t j, const std::vector<double>& values) const;
  DesignMatrix with_columns_appended(const DesignMatrix& extra) const;

  /// True when some column is a nonzero constant, i.e. the model contains
  /// an intercept direction.
  bool has_intercept() const;

 private:
  Matrix values_;
  std::vector<std::string> labels_;
};

struct FitResult {
  std::vector<std::string> column_labels;
  std::vector<double> coefficients;
  std::vector<double> stderrs;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  Matrix covariance;  // k x k coefficient covariance
  double sigma2 = 0.0;
  double rss = 0.0;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> residuals;
  bool degenerate_response = false;  // constant y: R^2 defined as 0

  std::size_t coefficient_index(const std::string& label) const;
};

/// Least-squares coefficients of min ||y - X b|| via Householder QR.
/// Throws SingularDesignError naming the dependent columns when X is
/// rank deficient under kRankRelTol.
std::vector<double> solve_least_squares(const DesignMatrix& x, const std::vector<double>& y);

/// Full OLS fit with classical inference: sigma2 = RSS/(n-k), covariance
/// sigma2 (X^T X)^{-1}, exact t-distribution p-values, centered R^2 when an
/// intercept is present. Requires n > k.
FitResult fit_ols(const DesignMatrix& x, const std::vector<double>& y);

}  // namespace mincer
