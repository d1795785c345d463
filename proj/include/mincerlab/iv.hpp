#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mincerlab/regression.hpp"

namespace mincer {

/// Staiger-Stock rule of thumb: a first-stage partial F below this flags a
/// weak instrument.
inline constexpr double kWeakInstrumentF = 10.0;

struct IvFitResult {
  /// Structural coefficients with inference. Unless the naive option was
  /// requested, sigma2/covariance/residuals come from y - X b with the
  /// ORIGINAL endogenous column, not its first-stage fitted values.
  FitResult second_stage;
  /// Regression of the endogenous column on all exogenous columns plus the
  /// instruments.
  FitResult first_stage;
  std::string endogenous_label;
  std::vector<std::string> instrument_labels;
};

/// Two-stage least squares with a single endogenous column. `instruments`
/// holds the excluded instruments; their labels must not collide with the
/// structural columns. With naive_se, the variance is the literal two-step
/// one (second-stage residuals), kept for comparison only.
IvFitResult fit_2sls(const DesignMatrix& x, const std::vector<double>& y,
                     const std::string& endogenous, const DesignMatrix& instruments,
                     bool naive_se = false);

enum class HausmanScope { EndogenousOnly, FullVector };

struct HausmanResult {
  double stat = 0.0;
  int df = 0;
  double p_value = 1.0;
  bool clamped = false;  // variance difference was not positive; stat forced to 0
};

/// Hausman specification test comparing OLS (efficient under exogeneity)
/// with 2SLS (consistent under endogeneity). The default scope tests the
/// endogenous coefficient alone (df = 1); FullVector uses the Moore-Penrose
/// pseudo-inverse of the covariance difference with df equal to its rank.
HausmanResult hausman_test(const FitResult& ols, const IvFitResult& iv,
                           HausmanScope scope = HausmanScope::EndogenousOnly);

/// Partial F statistic for the q excluded instruments:
/// ((RSS_r - RSS_u)/q) / (RSS_u/(n - k_u)).
double first_stage_partial_f(const FitResult& full, const FitResult& restricted,
                             std::size_t excluded_count);

struct IvDiagnostics {
  HausmanResult hausman;
  double first_stage_partial_f = 0.0;
  bool weak_instrument = false;  // first_stage_partial_f < 10
};

/// Runs the full endogeneity workup: OLS, 2SLS, Hausman on the endogenous
/// coefficient and the first-stage partial F with the weak flag.
IvDiagnostics diagnose_endogeneity(const DesignMatrix& x, const std::vector<double>& y,
                                   const std::string& endogenous,
                                   const DesignMatrix& instruments);

}  // namespace mincer
