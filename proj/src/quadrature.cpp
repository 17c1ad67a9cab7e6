#include "tal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "tal/common.hpp"

namespace tal {

namespace {

GaussRule compute_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double n = order;
  for (int i = 0; i < order; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& cached_rule(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

struct AdaptiveState {
  const Fn1* f;
  double abs_tol;
  double rel_tol;
  int max_depth;
  double scale;  // running magnitude estimate for the relative criterion
  int evals = 0;
};

double adaptive_recurse(AdaptiveState& st, double a, double b, double whole, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl_panel(*st.f, a, mid);
  const double right = gl_panel(*st.f, mid, b);
  st.evals += 32;
  const double diff = left + right - whole;
  st.scale = std::max(st.scale, std::abs(left + right));
  if (depth >= st.max_depth ||
      std::abs(diff) <= std::max(st.abs_tol, st.rel_tol * st.scale) * 0.5) {
    return left + right;
  }
  return adaptive_recurse(st, a, mid, left, depth + 1) +
         adaptive_recurse(st, mid, b, right, depth + 1);
}

}  // namespace

const GaussRule& gauss_legendre(int order) { return cached_rule(order); }

double gl_panel(const Fn1& f, double a, double b, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

double gl_composite(const Fn1& f, double a, double b, int panels, int order) {
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    sum += gl_panel(f, a + k * h, a + (k + 1) * h, order);
  }
  return sum;
}

QuadResult integrate_doubling(const Fn1& f, double a, double b, double rel_tol,
                              int initial_panels, int max_panels) {
  QuadResult result;
  int panels = initial_panels;
  double prev = gl_composite(f, a, b, panels);
  result.evaluations = panels * 16;
  while (panels < max_panels) {
    panels *= 2;
    const double next = gl_composite(f, a, b, panels);
    result.evaluations += panels * 16;
    const double err = std::abs(next - prev);
    if (err <= rel_tol * std::max(1.0, std::abs(next))) {
      result.value = next;
      result.error_estimate = err;
      return result;
    }
    prev = next;
  }
  result.value = prev;
  result.error_estimate = std::abs(prev) * rel_tol * 16;  // did not converge
  return result;
}

QuadResult integrate_adaptive(const Fn1& f, double a, double b, double abs_tol,
                              double rel_tol, int max_depth) {
  QuadResult result;
  if (!(b > a)) return result;
  AdaptiveState st{&f, abs_tol, rel_tol, max_depth, 0.0, 0};
  const double whole = gl_panel(f, a, b);
  st.evals = 16;
  result.value = adaptive_recurse(st, a, b, whole, 0);
  result.error_estimate = std::max(abs_tol, rel_tol * std::abs(result.value));
  result.evaluations = st.evals;
  return result;
}

QuadResult integrate_adaptive_split(const Fn1& f, double a, double b,
                                    std::span<const double> breakpoints,
                                    double abs_tol, double rel_tol) {
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  QuadResult total;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    QuadResult piece = integrate_adaptive(f, cuts[i], cuts[i + 1], abs_tol, rel_tol);
    total.value += piece.value;
    total.error_estimate += piece.error_estimate;
    total.evaluations += piece.evaluations;
  }
  return total;
}

QuadResult integrate_quantile_coords(const Fn1& g_central, const Fn1& lower_tail,
                                     const Fn1& upper_tail,
                                     std::span<const double> breakpoints,
                                     double eps, double rel_tol) {
  QuadResult central =
      integrate_adaptive_split(g_central, eps, 1.0 - eps, breakpoints, 1e-14, rel_tol);
  // Tail pieces in u = -log(q): integral over (0, eps) of g equals
  // int_{u0}^{inf} g(e^{-u}) e^{-u} du with u0 = -log(eps). The integrand
  // decays like e^{-u} times sqrt-log growth; 60 extra units of u put the
  // truncation error below e^{-70}.
  const double u0 = -std::log(eps);
  auto tail = [&](const Fn1& g_of_q) {
    Fn1 h = [&](double u) { return g_of_q(std::exp(-u)) * std::exp(-u); };
    return integrate_adaptive(h, u0, u0 + 60.0, 1e-16, rel_tol);
  };
  QuadResult lo = tail(lower_tail);
  QuadResult hi = tail(upper_tail);
  QuadResult total;
  total.value = central.value + lo.value + hi.value;
  total.error_estimate = central.error_estimate + lo.error_estimate + hi.error_estimate;
  total.evaluations = central.evaluations + lo.evaluations + hi.evaluations;
  return total;
}

}  // namespace tal
