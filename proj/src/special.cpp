#include "tal/special.hpp"

#include <cmath>

#include "tal/common.hpp"

namespace tal {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Newton refinement of an initial quantile guess, solving cdf(x) = p through
// whichever tail representation keeps the residual well conditioned.
double refine_quantile(double x, double p) {
  for (int it = 0; it < 4; ++it) {
    const double pdf = norm_pdf(x);
    if (pdf <= 0.0) break;
    double step;
    if (p < 0.5) {
      step = (norm_cdf(x) - p) / pdf;
    } else {
      step = -(norm_ccdf(x) - (1.0 - p)) / pdf;
    }
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

// Solve ccdf(x) = q by Newton on log ccdf starting from the Gaussian tail
// asymptote. Valid for q <= 0.5.
double tail_quantile(double q) {
  if (q >= 0.5) return refine_quantile(0.0, 1.0 - q);
  double x = std::sqrt(std::max(0.0, -2.0 * std::log(2.0 * q)));
  if (x < 0.1) x = 0.1;
  for (int it = 0; it < 60; ++it) {
    const double c = norm_ccdf(x);
    if (c <= 0.0) {  // beyond double range; back off
      x *= 0.99;
      continue;
    }
    const double g = std::log(c) - std::log(q);
    const double dg = -norm_pdf(x) / c;
    const double step = g / dg;
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_ccdf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::DomainError, "quantile needs p in (0,1)");
  // Peter Acklam's rational approximation as the initial guess, then Newton.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double u = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double u = p - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  return refine_quantile(x, p);
}

double norm_quantile_upper(double q) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::DomainError, "tail mass must be in (0,1)");
  if (q > 0.5) return -tail_quantile(1.0 - q);
  return tail_quantile(q);
}

double norm_quantile_lower(double q) { return -norm_quantile_upper(q); }

}  // namespace tal
