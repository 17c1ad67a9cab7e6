#include "tal/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace tal {

namespace {

double log_ratio(const Measure1D& mu, const Reference& ref, double x) {
  const double log_mu = mu.log_density(x);
  if (ref.is_lebesgue()) return log_mu;
  return log_mu - ref.get().log_density(x);
}

// Probe whether mu puts mass where the reference density vanishes.
bool absolutely_continuous(const Measure1D& mu, const Reference& ref) {
  if (ref.is_lebesgue()) return true;
  const Measure1D& m = ref.get();
  for (int i = 1; i <= 99; ++i) {
    const double x = mu.quantile(i / 100.0);
    if (mu.density(x) > 1e-300 && m.density(x) <= 0.0) return false;
  }
  for (double u = 16.0; u <= 64.0; u += 8.0) {
    const double q = std::exp(-u);
    const double xl = mu.quantile_lower_tail(q);
    const double xu = mu.quantile_upper_tail(q);
    if (mu.density(xl) > 1e-300 && m.density(xl) <= 0.0) return false;
    if (mu.density(xu) > 1e-300 && m.density(xu) <= 0.0) return false;
  }
  return true;
}

}  // namespace

FunctionalReport relative_entropy(const Measure1D& mu, const Reference& ref) {
  FunctionalReport report;
  report.name = ref.is_lebesgue() ? "shannon_entropy" : "relative_entropy";
  if (!ref.is_lebesgue() && mu.same_object(ref.get())) {
    return report;  // Ent_m(m) = 0 exactly
  }
  if (!absolutely_continuous(mu, ref)) {
    report.infinite = true;
    report.value = kInf;
    return report;
  }
  QuadResult q = integrate_against(mu, [&](double x) { return log_ratio(mu, ref, x); });
  report.value = q.value;
  report.error_estimate = q.error_estimate;
  if (!mu.smooth_density() || (!ref.is_lebesgue() && !ref.get().smooth_density())) {
    report.hypotheses_unverified = true;
  }
  return report;
}

FunctionalReport relative_entropy(const Measure1D& mu, const Measure1D& m) {
  return relative_entropy(mu, Reference::measure(m));
}

FunctionalReport relative_entropy_xspace(const Measure1D& mu, const Reference& ref) {
  FunctionalReport report;
  report.name = "relative_entropy_xspace";
  if (!absolutely_continuous(mu, ref)) {
    report.infinite = true;
    report.value = kInf;
    return report;
  }
  // rho_mu(x) log(dmu/dm)(x) dx over the effective support of mu.
  const double lo = mu.quantile_lower_tail(1e-18);
  const double hi = mu.quantile_upper_tail(1e-18);
  Fn1 integrand = [&](double x) {
    const double d = mu.density(x);
    if (d <= 1e-300) return 0.0;
    return d * log_ratio(mu, ref, x);
  };
  std::vector<double> cuts = mu.x_breakpoints();
  QuadResult q = integrate_adaptive_split(integrand, lo, hi, cuts, 1e-14, 1e-11);
  report.value = q.value;
  report.error_estimate = q.error_estimate;
  return report;
}

FunctionalReport fisher_information(const Measure1D& mu, const Measure1D& m) {
  FunctionalReport report;
  report.name = "fisher_information";
  if (mu.same_object(m)) return report;
  if (!absolutely_continuous(mu, Reference::measure(m))) {
    report.infinite = true;
    report.value = kInf;
    return report;
  }
  const bool analytic = mu.impl().has_analytic_score() && m.impl().has_analytic_score();
  if (!analytic) {
    // Check the finite-difference fallback is usable: densities above the
    // floor on all but a sliver of the mass.
    int bad = 0;
    const int n = 199;
    for (int i = 1; i <= n; ++i) {
      const double x = mu.quantile(i / (n + 1.0));
      if (mu.density(x) < 1e-12 || m.density(x) < 1e-12) ++bad;
    }
    if (bad > n / 100) report.unreliable = true;
  }
  Fn1 integrand = [&](double x) {
    const double s = mu.log_density_derivative(x) - m.log_density_derivative(x);
    return s * s;
  };
  QuadResult q = integrate_against(mu, integrand);
  report.value = q.value;
  report.error_estimate = q.error_estimate;
  if (!mu.smooth_density() || !m.smooth_density()) report.hypotheses_unverified = true;
  return report;
}

double levy_point(const Measure1D& m, const Measure1D& mu) {
  const double xi = m.mode();  // throws AmbiguousMode when not unique
  const double p = m.cdf(xi);
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorKind::DegenerateTarget, "reference mode has degenerate CDF value");
  }
  return mu.quantile(p);
}

PhiReport phi_correction(const Measure1D& m, const Measure1D& mu, const Measure1D& nu) {
  PhiReport report;
  report.alpha_mu = levy_point(m, mu);
  report.alpha_nu = levy_point(m, nu);
  const double bary_mu = mu.barycenter();
  const double bary_nu = nu.barycenter();
  const double bary_m = m.barycenter();
  const double xi_m = m.mode();
  const double s = 0.5 * (bary_mu + bary_nu);

  const double linear = -report.alpha_nu * bary_mu - report.alpha_mu * bary_nu +
                        report.alpha_mu * report.alpha_nu +
                        (report.alpha_mu + report.alpha_nu) * (bary_m - xi_m);
  const double q_plus = xi_m - bary_m + s;
  const double q_minus = bary_m - s;
  report.quadratic_part = q_plus * q_plus - q_minus * q_minus;
  report.phi = linear + report.quadratic_part;

  if (is_standard_gaussian(m)) {
    const double phi_gamma = -report.alpha_nu * bary_mu - report.alpha_mu * bary_nu +
                             report.alpha_mu * report.alpha_nu;
    report.phi_gaussian_min = std::min(phi_gamma, -bary_mu * bary_nu);
  }
  return report;
}

std::optional<std::pair<double, double>> as_gaussian(const Measure1D& m) {
  if (!m.valid()) return std::nullopt;
  const auto lo = m.convexity_lower();
  const auto hi = m.convexity_upper();
  if (!lo || !hi || *lo != *hi || !(*lo > 0)) return std::nullopt;
  if (!m.full_support() || !m.smooth_density()) return std::nullopt;
  const double var = 1.0 / *lo;
  const double mean = m.impl().cached_moments().barycenter;
  // Equal two-sided curvature plus full support pins the density to the
  // Gaussian family; verify the variance against the cached second moment.
  const double second = m.impl().cached_moments().second_moment;
  if (std::abs(second - (mean * mean + var)) > 1e-8 * std::max(1.0, second)) {
    return std::nullopt;
  }
  return std::make_pair(mean, var);
}

bool is_standard_gaussian(const Measure1D& m, double tol) {
  const auto g = as_gaussian(m);
  return g && std::abs(g->first) <= tol && std::abs(g->second - 1.0) <= tol;
}

}  // namespace tal
