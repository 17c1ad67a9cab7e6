#include "tal/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tal {

namespace {

constexpr double kDensityFloor = 1e-12;

// Nonuniform second-order first derivative on three points.
double deriv3(double x0, double x1, double x2, double f0, double f1, double f2, double at) {
  // Lagrange derivative of the quadratic through the three points.
  const double d0 = (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
  const double d1 = (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
  const double d2 = (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
  return f0 * d0 + f1 * d1 + f2 * d2;
}

}  // namespace

std::vector<double> chebyshev_probability_grid(int k, double eps) {
  if (k < 2) fail(ErrorKind::DomainError, "probability grid needs at least 2 points");
  std::vector<double> ps(k);
  for (int i = 0; i < k; ++i) {
    const double c = 0.5 * (1.0 - std::cos(M_PI * i / (k - 1)));
    ps[i] = eps + (1.0 - 2.0 * eps) * c;
  }
  return ps;
}

TransportMap1D::TransportMap1D(Measure1D source, Measure1D target, int grid_size)
    : source_(std::move(source)), target_(std::move(target)) {
  if (grid_size < 64) fail(ErrorKind::DomainError, "transport grid needs K >= 64");
  probabilities_ = chebyshev_probability_grid(grid_size);
  // Make sure structural breakpoints of either measure are grid points.
  for (double p : source_.p_breakpoints()) probabilities_.push_back(p);
  for (double p : target_.p_breakpoints()) probabilities_.push_back(p);
  std::sort(probabilities_.begin(), probabilities_.end());
  probabilities_.erase(std::unique(probabilities_.begin(), probabilities_.end()),
                       probabilities_.end());

  xs_.resize(probabilities_.size());
  ts_.resize(probabilities_.size());
  dts_.resize(probabilities_.size());
  for (size_t i = 0; i < probabilities_.size(); ++i) {
    xs_[i] = source_.quantile(probabilities_[i]);
    ts_[i] = target_.quantile(probabilities_[i]);
    if (!std::isfinite(ts_[i])) {
      fail(ErrorKind::DegenerateTarget,
           "target quantile undefined at p = " + std::to_string(probabilities_[i]));
    }
  }
  for (size_t i = 0; i + 1 < ts_.size(); ++i) {
    if (ts_[i + 1] < ts_[i] - 1e-12 * (1.0 + std::abs(ts_[i]))) {
      fail(ErrorKind::NumericMonotonicityBreak, "map values decreased across the grid");
    }
  }
  for (size_t i = 0; i < xs_.size(); ++i) dts_[i] = derivative(xs_[i]);

  // Fritsch-Carlson monotone cubic tangents.
  const size_t n = xs_.size();
  std::vector<double> secants(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    const double h = xs_[i + 1] - xs_[i];
    secants[i] = h > 0 ? (ts_[i + 1] - ts_[i]) / h : 0.0;
  }
  slopes_.assign(n, 0.0);
  slopes_[0] = secants.front();
  slopes_[n - 1] = secants.back();
  for (size_t i = 1; i + 1 < n; ++i) {
    if (secants[i - 1] * secants[i] <= 0.0) {
      slopes_[i] = 0.0;
    } else {
      const double h0 = xs_[i] - xs_[i - 1], h1 = xs_[i + 1] - xs_[i];
      slopes_[i] = 3.0 * (h0 + h1) /
                   ((2.0 * h1 + h0) / secants[i - 1] + (h1 + 2.0 * h0) / secants[i]);
    }
  }

  hypotheses_ok_ = source_.full_support() && source_.smooth_density() &&
                   target_.smooth_density();
}

double TransportMap1D::operator()(double x) const {
  if (x <= xs_.front()) return ts_.front() + dts_.front() * (x - xs_.front());
  if (x >= xs_.back()) return ts_.back() + dts_.back() * (x - xs_.back());
  const size_t k = std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin() - 1;
  const double h = xs_[k + 1] - xs_[k];
  if (!(h > 0)) return ts_[k];
  const double t = (x - xs_[k]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * ts_[k] + h10 * h * slopes_[k] + h01 * ts_[k + 1] + h11 * h * slopes_[k + 1];
}

double TransportMap1D::evaluate_exact(double x) const {
  const double p = source_.cdf(x);
  if (p <= 0.0) return ts_.front();
  if (p >= 1.0) return ts_.back();
  if (p < 1e-14) return target_.quantile_lower_tail(p);
  if (p > 1.0 - 1e-14) return target_.quantile_upper_tail(source_.ccdf(x));
  return target_.quantile(p);
}

double TransportMap1D::derivative(double x) const {
  const double rho_s = source_.density(x);
  const double rho_t = target_.density(evaluate_exact(x));
  if (rho_t < 1e-300) return kInf;
  return rho_s / rho_t;
}

TransportMap1D optimal_map(const Measure1D& source, const Measure1D& target, int grid_size) {
  return TransportMap1D(source, target, grid_size);
}

double w2_squared(const Measure1D& mu, const Measure1D& nu) {
  if (mu.same_object(nu)) return 0.0;
  std::vector<double> breaks = mu.p_breakpoints();
  for (double p : nu.p_breakpoints()) breaks.push_back(p);
  auto sq = [](double d) { return d * d; };
  Fn1 central = [&](double p) { return sq(mu.quantile(p) - nu.quantile(p)); };
  Fn1 lower = [&](double q) {
    return sq(mu.quantile_lower_tail(q) - nu.quantile_lower_tail(q));
  };
  Fn1 upper = [&](double q) {
    return sq(mu.quantile_upper_tail(q) - nu.quantile_upper_tail(q));
  };
  return std::max(
      integrate_quantile_coords(central, lower, upper, breaks, 1e-6, 1e-11).value, 0.0);
}

double w2(const Measure1D& mu, const Measure1D& nu) { return std::sqrt(w2_squared(mu, nu)); }

double w2_squared_xspace(const Measure1D& mu, const Measure1D& nu) {
  auto cost = [&](double x, double q_from_tail, bool upper) {
    double p = upper ? -1.0 : mu.cdf(x);
    double t;
    if (upper) {
      t = nu.quantile_upper_tail(q_from_tail);
    } else if (p < 1e-14) {
      t = nu.quantile_lower_tail(std::max(p, 1e-300));
    } else if (p > 1.0 - 1e-14) {
      t = nu.quantile_upper_tail(std::max(mu.ccdf(x), 1e-300));
    } else {
      t = nu.quantile(p);
    }
    return (t - x) * (t - x);
  };
  // Integrate (T(x) - x)^2 dmu in quantile coordinates of mu, but with T
  // composed through x-space CDF values, which discretizes independently of
  // the direct quantile-difference route.
  std::vector<double> breaks = mu.p_breakpoints();
  Fn1 central = [&](double p) {
    const double x = mu.quantile(p);
    return cost(x, 0.0, false);
  };
  Fn1 lower = [&](double q) {
    const double x = mu.quantile_lower_tail(q);
    return cost(x, 0.0, false);
  };
  Fn1 upper = [&](double q) {
    const double x = mu.quantile_upper_tail(q);
    return cost(x, q, true);
  };
  return std::max(
      integrate_quantile_coords(central, lower, upper, breaks, 1e-6, 1e-11).value, 0.0);
}

MaResidualReport ma_residual(const TransportMap1D& map) {
  MaResidualReport report;
  const auto xs = map.source_points();
  const auto ts = map.map_values();
  const size_t n = xs.size();
  report.derivative.assign(n, 0.0);

  const Measure1D& src = map.source();
  const Measure1D& tgt = map.target();
  for (size_t i = 0; i < n; ++i) {
    const double rho_s = src.density(xs[i]);
    const double rho_t = tgt.density(ts[i]);
    if (rho_t < 1e-300) {
      report.derivative[i] = kInf;
      if (rho_s > kDensityFloor) report.overflow_flagged = true;
      continue;
    }
    report.derivative[i] = rho_s / rho_t;
  }

  for (size_t i = 0; i < n; ++i) {
    const size_t j = std::min(std::max<size_t>(i, 1), n - 2);
    const double t_geom = deriv3(xs[j - 1], xs[j], xs[j + 1], ts[j - 1], ts[j], ts[j + 1],
                                 xs[i]);
    const double rho_s = src.density(xs[i]);
    const double rho_t = tgt.density(ts[i]);
    if (rho_t < 1e-300) continue;
    const double res = std::abs(rho_s - rho_t * t_geom) / std::max(rho_s, kDensityFloor);
    report.residual = std::max(report.residual, res);
  }
  return report;
}

ContractionReport contraction_check(const TransportMap1D& map, double kappa0, double kappa1) {
  if (!(kappa0 > 0) || !(kappa1 > 0)) {
    fail(ErrorKind::MissingBounds, "contraction check needs positive kappa0, kappa1");
  }
  const auto src_hi = map.source().convexity_upper();
  const auto tgt_lo = map.target().convexity_lower();
  if (!src_hi) {
    fail(ErrorKind::MissingBounds, "source measure has no upper convexity bound");
  }
  if (!tgt_lo) {
    fail(ErrorKind::MissingBounds, "target measure has no lower convexity bound");
  }
  const double tol = 1e-7;
  if (*src_hi > kappa0 * (1.0 + tol) + tol) {
    fail(ErrorKind::MissingBounds, "declared kappa0 below the source curvature bound");
  }
  if (*tgt_lo < kappa1 * (1.0 - tol) - tol) {
    fail(ErrorKind::MissingBounds, "declared kappa1 above the target curvature bound");
  }

  ContractionReport report;
  report.bound = std::sqrt(kappa0 / kappa1);
  report.hypotheses_ok = map.hypotheses_ok();
  const auto dts = map.derivative_values();
  for (double d : dts) report.sup_derivative = std::max(report.sup_derivative, d);
  const auto ts = map.map_values();
  report.monotone = true;
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] < ts[i] - 1e-12 * (1.0 + std::abs(ts[i]))) report.monotone = false;
  }
  const double eff_tol = tol * std::max(1.0, report.bound);
  report.holds = report.sup_derivative <= report.bound + eff_tol;
  report.tight = report.holds && report.sup_derivative >= report.bound - eff_tol;
  return report;
}

DualGapReport dual_gap(const DualPair& pair, const Measure1D& mu, const Measure1D& nu) {
  // Admissibility on a deterministic tensor grid over the central 1 - 1e-4
  // mass of each marginal.
  const int n = 201;
  const double p_lo = 5e-5, p_hi = 1.0 - 5e-5;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    const double p = p_lo + (p_hi - p_lo) * i / (n - 1);
    xs[i] = mu.quantile(p);
    ys[i] = nu.quantile(p);
  }
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    scale = std::max({scale, std::abs(pair.f(xs[i])), std::abs(pair.g(ys[i]))});
  }
  const double tol = 1e-9 * scale;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double margin = pair.margin(xs[i], ys[j]);
      if (margin < -tol) {
        std::ostringstream msg;
        msg << "f(x) + g(y) > (x - y)^2 at witness (x, y) = (" << xs[i] << ", " << ys[j]
            << "), excess " << -margin;
        fail(ErrorKind::InadmissiblePair, msg.str());
      }
    }
  }

  DualGapReport report;
  const double int_f = integrate_against(mu, [&](double x) { return pair.f(x); }).value;
  const double int_g = integrate_against(nu, [&](double y) { return pair.g(y); }).value;
  report.dual_value = int_f + int_g;
  report.w2sq = w2_squared(mu, nu);
  report.gap = report.w2sq - report.dual_value;
  return report;
}

}  // namespace tal
