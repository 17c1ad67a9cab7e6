#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tal {

using Fn1 = std::function<double(double)>;

/// Gauss-Legendre rule on [-1, 1]. Nodes/weights are computed once per order
/// by Newton iteration on the Legendre polynomial and cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

/// Integral of f over [a, b] with a single Gauss-Legendre panel.
double gl_panel(const Fn1& f, double a, double b, int order = 16);

/// Composite Gauss-Legendre with `panels` equal panels on [a, b].
double gl_composite(const Fn1& f, double a, double b, int panels, int order = 16);

/// Result of a self-validating quadrature: value plus the error estimate
/// obtained from the last refinement step.
struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Panel-doubling composite quadrature: doubles the panel count until two
/// successive results agree to rel_tol (relative to max(1, |value|)).
QuadResult integrate_doubling(const Fn1& f, double a, double b,
                              double rel_tol = 1e-12, int initial_panels = 8,
                              int max_panels = 1 << 16);

/// Adaptive bisection quadrature. Splits an interval whenever the two-child
/// composite disagrees with the parent panel. Handles integrable endpoint and
/// interior singularities (log-type) that defeat uniform refinement.
QuadResult integrate_adaptive(const Fn1& f, double a, double b,
                              double abs_tol = 1e-12, double rel_tol = 1e-11,
                              int max_depth = 52);

/// Like integrate_adaptive but forces panel boundaries at the given interior
/// breakpoints (sorted or not; points outside (a,b) are ignored).
QuadResult integrate_adaptive_split(const Fn1& f, double a, double b,
                                    std::span<const double> breakpoints,
                                    double abs_tol = 1e-12, double rel_tol = 1e-11);

/// Integral of g over p in (0,1) where g may have sqrt-log growth at both
/// endpoints (quantile-coordinate integrands). The central part [eps, 1-eps]
/// uses adaptive panels; the two tails are integrated in the substituted
/// variable u = -log p (resp. u = -log(1-p)) via g_tail callbacks that accept
/// the tail mass q = e^{-u}:
///   lower_tail(q) == g(q),  upper_tail(q) == g(1 - q)
/// evaluated through tail-stable quantile paths.
QuadResult integrate_quantile_coords(const Fn1& g_central, const Fn1& lower_tail,
                                     const Fn1& upper_tail,
                                     std::span<const double> breakpoints,
                                     double eps = 1e-6, double rel_tol = 1e-11);

}  // namespace tal
