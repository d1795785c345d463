#include "mincerlab/iv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mincerlab/distributions.hpp"
#include "mincerlab/errors.hpp"

namespace mincer {

namespace {

void check_same_fit_shape(const FitResult& a, const FitResult& b) {
  if (a.n != b.n) throw std::invalid_argument("fits come from samples of different size");
  std::set<std::string> la(a.column_labels.begin(), a.column_labels.end());
  std::set<std::string> lb(b.column_labels.begin(), b.column_labels.end());
  if (la != lb) throw std::invalid_argument("fits have different column sets");
}

}  // namespace

IvFitResult fit_2sls(const DesignMatrix& x, const std::vector<double>& y,
                     const std::string& endogenous, const DesignMatrix& instruments,
                     bool naive_se) {
  if (instruments.k() < 1) throw std::invalid_argument("under-identified: no excluded instruments");
  if (instruments.n() != x.n())
    throw std::invalid_argument("instrument rows do not match design rows");
  const std::size_t endo = x.column_index(endogenous);
  for (const std::string& z : instruments.labels()) {
    for (const std::string& c : x.labels()) {
      if (z == c)
        throw std::invalid_argument("instrument '" + z + "' is already a structural column");
    }
  }

  IvFitResult out;
  out.endogenous_label = endogenous;
  out.instrument_labels = instruments.labels();

  // Stage 1: endogenous column on every exogenous column plus the instruments.
  const DesignMatrix exog = x.without_column(endo);
  const DesignMatrix stage1 = exog.with_columns_appended(instruments);
  const std::vector<double> endo_values = x.column(endo);
  out.first_stage = fit_ols(stage1, endo_values);

  std::vector<double> fitted = multiply(stage1.values(), out.first_stage.coefficients);

  // Stage 2: response on the exogenous columns with the endogenous column
  // replaced by its first-stage fitted values.
  const DesignMatrix stage2 = x.with_column_replaced(endo, fitted);
  FitResult second = fit_ols(stage2, y);

  if (!naive_se) {
    // Re-derive the error variance from the structural residuals.
    const std::size_t n = x.n();
    const std::size_t k = x.k();
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double pred = 0.0;
      for (std::size_t j = 0; j < k; ++j) pred += x.values()(i, j) * second.coefficients[j];
      second.residuals[i] = y[i] - pred;
      rss += second.residuals[i] * second.residuals[i];
    }
    const double old_sigma2 = second.sigma2;
    second.rss = rss;
    second.sigma2 = rss / static_cast<double>(n - k);
    const double scale = old_sigma2 > 0.0 ? second.sigma2 / old_sigma2
                                          : 0.0;  // rebuilt below when the naive fit was exact

    if (old_sigma2 > 0.0) {
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) second.covariance(i, j) *= scale;
    } else {
      HouseholderQr qr(stage2.values());
      second.covariance = qr.xtx_inverse();
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) second.covariance(i, j) *= second.sigma2;
    }

    const int df = static_cast<int>(n - k);
    for (std::size_t j = 0; j < k; ++j) {
      second.stderrs[j] = std::sqrt(std::max(0.0, second.covariance(j, j)));
      if (second.stderrs[j] > 0.0) {
        second.t_stats[j] = second.coefficients[j] / second.stderrs[j];
        second.p_values[j] = t_two_sided_p(second.t_stats[j], df);
      } else {
        second.t_stats[j] = second.coefficients[j] == 0.0
                                ? 0.0
                                : std::copysign(std::numeric_limits<double>::infinity(),
                                                second.coefficients[j]);
        second.p_values[j] = second.coefficients[j] == 0.0 ? 1.0 : 0.0;
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
      second.r_squared = 1.0 - rss / tss;
      if (second.r_squared > 1.0) second.r_squared = 1.0;
    } else {
      second.r_squared = 0.0;
      second.degenerate_response = true;
    }
    second.adj_r_squared = 1.0 - (1.0 - second.r_squared) * static_cast<double>(n - 1) /
                                     static_cast<double>(n - k);
  }

  out.second_stage = std::move(second);
  return out;
}

HausmanResult hausman_test(const FitResult& ols, const IvFitResult& iv, HausmanScope scope) {
  const FitResult& ivf = iv.second_stage;
  check_same_fit_shape(ols, ivf);

  HausmanResult out;
  if (scope == HausmanScope::EndogenousOnly) {
    const std::size_t jo = ols.coefficient_index(iv.endogenous_label);
    const std::size_t ji = ivf.coefficient_index(iv.endogenous_label);
    const double diff = ivf.coefficients[ji] - ols.coefficients[jo];
    const double var_diff = ivf.covariance(ji, ji) - ols.covariance(jo, jo);
    out.df = 1;
    if (diff == 0.0) {
      out.stat = 0.0;
    } else if (var_diff <= 0.0) {
      out.stat = 0.0;
      out.clamped = true;
    } else {
      out.stat = diff * diff / var_diff;
    }
  } else {
    // Align the IV fit to the OLS column order, then use the pseudo-inverse
    // of the covariance difference.
    const std::size_t k = ols.k;
    std::vector<std::size_t> map(k);
    for (std::size_t j = 0; j < k; ++j) map[j] = ivf.coefficient_index(ols.column_labels[j]);

    std::vector<double> d(k);
    Matrix v(k, k);
    for (std::size_t a = 0; a < k; ++a) {
      d[a] = ivf.coefficients[map[a]] - ols.coefficients[a];
      for (std::size_t b = 0; b < k; ++b)
        v(a, b) = ivf.covariance(map[a], map[b]) - ols.covariance(a, b);
    }

    std::size_t rank = 0;
    Matrix pinv = symmetric_pseudo_inverse(v, 1e-10, &rank);
    double stat = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) stat += d[a] * pinv(a, b) * d[b];

    out.df = static_cast<int>(std::max<std::size_t>(rank, 1));
    if (stat < 0.0) {
      out.stat = 0.0;
      out.clamped = true;
    } else {
      out.stat = stat;
    }
  }

  out.p_value = 1.0 - chi2_cdf(out.stat, out.df);
  return out;
}

double first_stage_partial_f(const FitResult& full, const FitResult& restricted,
                             std::size_t excluded_count) {
  if (excluded_count < 1) throw std::invalid_argument("excluded instrument count must be >= 1");
  if (full.n != restricted.n)
    throw std::invalid_argument("full and restricted fits use different samples");
  if (restricted.k + excluded_count != full.k) {
    std::ostringstream msg;
    msg << "restricted model must equal the full model minus the " << excluded_count
        << " excluded instrument(s): k_full=" << full.k << ", k_restricted=" << restricted.k;
    throw std::invalid_argument(msg.str());
  }
  if (full.rss <= 0.0)
    throw std::runtime_error("degenerate first stage: unrestricted fit is exact (RSS = 0)");

  const double num = std::max(0.0, restricted.rss - full.rss) / static_cast<double>(excluded_count);
  const double den = full.rss / static_cast<double>(full.n - full.k);
  return num / den;
}

IvDiagnostics diagnose_endogeneity(const DesignMatrix& x, const std::vector<double>& y,
                                   const std::string& endogenous,
                                   const DesignMatrix& instruments) {
  const FitResult ols = fit_ols(x, y);
  const IvFitResult iv = fit_2sls(x, y, endogenous, instruments);

  const std::size_t endo = x.column_index(endogenous);
  const DesignMatrix exog = x.without_column(endo);
  const FitResult restricted = fit_ols(exog, x.column(endo));

  IvDiagnostics out;
  out.hausman = hausman_test(ols, iv, HausmanScope::EndogenousOnly);
  out.first_stage_partial_f = first_stage_partial_f(iv.first_stage, restricted, instruments.k());
  out.weak_instrument = out.first_stage_partial_f < kWeakInstrumentF;
  return out;
}

}  // namespace mincer
