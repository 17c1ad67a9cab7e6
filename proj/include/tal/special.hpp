#pragma once

namespace tal {

/// Standard normal density, CDF and complementary CDF. The CCDF is computed
/// through erfc so it keeps full relative accuracy deep in the upper tail.
double norm_pdf(double x);
double norm_cdf(double x);
double norm_ccdf(double x);

/// Standard normal quantile for p in (0,1). Accurate to ~2 ulp everywhere.
double norm_quantile(double p);

/// Solves norm_ccdf(x) = q for tiny tail masses q (stable down to q ~ 1e-300).
double norm_quantile_upper(double q);

/// Solves norm_cdf(x) = q for tiny q; equals -norm_quantile_upper(q).
double norm_quantile_lower(double q);

}  // namespace tal
