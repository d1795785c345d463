#include "mincerlab/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace mincer {

namespace {

constexpr int kMaxIter = 400;
constexpr double kEps = 1e-15;
constexpr double kFpMin = 1e-300;

double clamp01(double p) {
  if (p < 0.0) return 0.0;
  if (p > 1.0) return 1.0;
  return p;
}

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete_beta: a and b must be positive");
  if (std::isnan(x)) throw std::domain_error("incomplete_beta: x is NaN");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return clamp01(bt * beta_cf(a, b, x) / a);
  }
  return clamp01(1.0 - bt * beta_cf(b, a, 1.0 - x) / b);
}

double incomplete_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("incomplete_gamma_p: a must be positive");
  if (std::isnan(x) || x < 0.0) throw std::domain_error("incomplete_gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  if (x < a + 1.0) {
    // Series representation.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return clamp01(sum * std::exp(-x + a * std::log(x) - std::lgamma(a)));
  }

  // Continued fraction for the upper tail Q(a, x).
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) break;
  }
  const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  return clamp01(1.0 - q);
}

double t_cdf(double x, int df) {
  if (df < 1) throw std::domain_error("t_cdf: df must be >= 1");
  if (std::isnan(x)) throw std::domain_error("t_cdf: x is NaN");
  if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;

  const double v = static_cast<double>(df);
  const double z = v / (v + x * x);
  const double half_tail = 0.5 * incomplete_beta(0.5 * v, 0.5, z);
  return x >= 0.0 ? 1.0 - half_tail : half_tail;
}

double chi2_cdf(double x, int df) {
  if (df < 1) throw std::domain_error("chi2_cdf: df must be >= 1");
  if (std::isnan(x)) throw std::domain_error("chi2_cdf: x is NaN");
  if (x < 0.0) throw std::domain_error("chi2_cdf: x must be nonnegative");
  if (std::isinf(x)) return 1.0;
  return incomplete_gamma_p(0.5 * df, 0.5 * x);
}

double t_two_sided_p(double t, int df) {
  if (std::isnan(t)) throw std::domain_error("t_two_sided_p: t is NaN");
  const double p = 2.0 * (1.0 - t_cdf(std::fabs(t), df));
  return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

}  // namespace mincer
