#include "mincerlab/regression.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "mincerlab/distributions.hpp"
#include "mincerlab/errors.hpp"

namespace mincer {

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ", ";
    out += labels[i];
  }
  return out;
}

void check_response(const std::vector<double>& y, std::size_t n) {
  if (y.size() != n) throw std::invalid_argument("response length does not match design rows");
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("response contains a non-finite value");
  }
}

[[noreturn]] void throw_singular(const DesignMatrix& x, const std::vector<std::size_t>& bad) {
  std::vector<std::string> names;
  names.reserve(bad.size());
  for (std::size_t j : bad) names.push_back(x.labels()[j]);
  std::ostringstream msg;
  msg << "singular design: column(s) " << join_labels(names)
      << " are linearly dependent on the others";
  throw SingularDesignError(msg.str(), std::move(names));
}

}  // namespace

DesignMatrix::DesignMatrix(Matrix values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  const std::size_t n = values_.rows();
  const std::size_t k = values_.cols();
  if (k < 1) throw std::invalid_argument("design matrix needs at least one column");
  if (labels_.size() != k) throw std::invalid_argument("design matrix label count mismatch");
  if (n < k) {
    std::ostringstream msg;
    msg << "design matrix needs at least as many rows as columns (n=" << n << ", k=" << k << ")";
    throw InsufficientDataError(msg.str());
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw std::invalid_argument("duplicate column label '" + l + "'");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(values_(i, j))) {
        std::ostringstream msg;
        msg << "non-finite entry at row " << i << ", column '" << labels_[j] << "'";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

std::size_t DesignMatrix::column_index(const std::string& label) const {
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    if (labels_[j] == label) return j;
  }
  throw std::invalid_argument("no column labeled '" + label + "'");
}

std::vector<double> DesignMatrix::column(std::size_t j) const {
  std::vector<double> out(n());
  for (std::size_t i = 0; i < n(); ++i) out[i] = values_(i, j);
  return out;
}

DesignMatrix DesignMatrix::without_column(std::size_t drop) const {
  Matrix m(n(), k() - 1);
  std::vector<std::string> l;
  l.reserve(k() - 1);
  for (std::size_t j = 0, t = 0; j < k(); ++j) {
    if (j == drop) continue;
    for (std::size_t i = 0; i < n(); ++i) m(i, t) = values_(i, j);
    l.push_back(labels_[j]);
    ++t;
  }
  return DesignMatrix(std::move(m), std::move(l));
}

DesignMatrix DesignMatrix::with_column_replaced(std::size_t j, const std::vector<double>& v) const {
  if (v.size() != n()) throw std::invalid_argument("replacement column length mismatch");
  Matrix m = values_;
  for (std::size_t i = 0; i < n(); ++i) m(i, j) = v[i];
  return DesignMatrix(std::move(m), labels_);
}

DesignMatrix DesignMatrix::with_columns_appended(const DesignMatrix& extra) const {
  if (extra.n() != n()) throw std::invalid_argument("appended columns row count mismatch");
  Matrix m(n(), k() + extra.k());
  for (std::size_t i = 0; i < n(); ++i) {
    for (std::size_t j = 0; j < k(); ++j) m(i, j) = values_(i, j);
    for (std::size_t j = 0; j < extra.k(); ++j) m(i, k() + j) = extra.values()(i, j);
  }
  std::vector<std::string> l = labels_;
  l.insert(l.end(), extra.labels().begin(), extra.labels().end());
  return DesignMatrix(std::move(m), std::move(l));
}

bool DesignMatrix::has_intercept() const {
  for (std::size_t j = 0; j < k(); ++j) {
    const double first = values_(0, j);
    if (first == 0.0) continue;
    bool constant = true;
    for (std::size_t i = 1; i < n(); ++i) {
      if (values_(i, j) != first) {
        constant = false;
        break;
      }
    }
    if (constant) return true;
  }
  return false;
}

std::size_t FitResult::coefficient_index(const std::string& label) const {
  for (std::size_t j = 0; j < column_labels.size(); ++j) {
    if (column_labels[j] == label) return j;
  }
  throw std::invalid_argument("fit has no coefficient labeled '" + label + "'");
}

std::vector<double> solve_least_squares(const DesignMatrix& x, const std::vector<double>& y) {
  check_response(y, x.n());
  HouseholderQr qr(x.values());
  const auto bad = qr.deficient_columns(kRankRelTol);
  if (!bad.empty()) throw_singular(x, bad);
  return qr.solve(y);
}

FitResult fit_ols(const DesignMatrix& x, const std::vector<double>& y) {
  const std::size_t n = x.n();
  const std::size_t k = x.k();
  check_response(y, n);
  if (n <= k) {
    std::ostringstream msg;
    msg << "fit_ols needs more observations than coefficients (n=" << n << ", k=" << k << ")";
    throw InsufficientDataError(msg.str());
  }

  HouseholderQr qr(x.values());
  const auto bad = qr.deficient_columns(kRankRelTol);
  if (!bad.empty()) throw_singular(x, bad);

  FitResult fit;
  fit.column_labels = x.labels();
  fit.n = n;
  fit.k = k;
  fit.coefficients = qr.solve(y);

  fit.residuals.resize(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = 0.0;
    for (std::size_t j = 0; j < k; ++j) pred += x.values()(i, j) * fit.coefficients[j];
    fit.residuals[i] = y[i] - pred;
    rss += fit.residuals[i] * fit.residuals[i];
  }
  fit.rss = rss;

  const std::size_t df = n - k;
  fit.sigma2 = rss / static_cast<double>(df);

  fit.covariance = qr.xtx_inverse();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) fit.covariance(i, j) *= fit.sigma2;

  fit.stderrs.resize(k);
  fit.t_stats.resize(k);
  fit.p_values.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    fit.stderrs[j] = std::sqrt(std::max(0.0, fit.covariance(j, j)));
    if (fit.stderrs[j] > 0.0) {
      fit.t_stats[j] = fit.coefficients[j] / fit.stderrs[j];
      fit.p_values[j] = t_two_sided_p(fit.t_stats[j], static_cast<int>(df));
    } else {
      // Exact fit: the coefficient is either identically zero or pinned.
      fit.t_stats[j] = fit.coefficients[j] == 0.0
                           ? 0.0
                           : std::copysign(std::numeric_limits<double>::infinity(),
                                           fit.coefficients[j]);
      fit.p_values[j] = fit.coefficients[j] == 0.0 ? 1.0 : 0.0;
    }
  }

  double tss = 0.0;
  if (x.has_intercept()) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    for (double v : y) tss += (v - mean) * (v - mean);
  } else {
    for (double v : y) tss += v * v;
  }

  if (tss > 0.0) {
    fit.r_squared = 1.0 - rss / tss;
    if (fit.r_squared < 0.0 && x.has_intercept()) fit.r_squared = 0.0;
    if (fit.r_squared > 1.0) fit.r_squared = 1.0;
  } else {
    fit.r_squared = 0.0;
    fit.degenerate_response = true;
  }
  fit.adj_r_squared =
      1.0 - (1.0 - fit.r_squared) * static_cast<double>(n - 1) / static_cast<double>(df);

  return fit;
}

}  // namespace mincer
