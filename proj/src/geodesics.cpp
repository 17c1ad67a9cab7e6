#include "tal/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace tal {

namespace {

/// Measure obtained by pushing a base measure through the monotone map
/// y(x) = (1-t) T0(x) + t T1(x), with T0 the identity for plain geodesics.
/// Quantiles and densities are evaluated exactly through the maps, never by
/// re-normalizing a sampled density.
class PushforwardMeasure final : public Measure {
 public:
  PushforwardMeasure(Measure1D base, std::shared_ptr<const TransportMap1D> t0,
                     std::shared_ptr<const TransportMap1D> t1, double t)
      : base_(std::move(base)), t0_(std::move(t0)), t1_(std::move(t1)), t_(t) {
    auto add = [&](const Measure1D& m) {
      for (double p : m.p_breakpoints()) p_breaks_.push_back(p);
    };
    add(base_);
    if (t0_) add(t0_->target());
    if (t1_) add(t1_->target());
    std::sort(p_breaks_.begin(), p_breaks_.end());
    p_breaks_.erase(std::unique(p_breaks_.begin(), p_breaks_.end()), p_breaks_.end());
    smooth_ = base_.smooth_density() && (!t0_ || t0_->target().smooth_density()) &&
              (!t1_ || t1_->target().smooth_density());
    full_maps_ = (!t0_ || t0_->target().full_support()) &&
                 (!t1_ || t1_->target().full_support());

    // Monotonicity of the interpolated map at the construction grid.
    const auto& grid = (t1_ ? *t1_ : *t0_).source_points();
    double prev = -kInf;
    for (double x : grid) {
      const double y = map(x);
      if (!(y >= prev - 1e-12 * (1.0 + std::abs(prev)))) {
        fail(ErrorKind::NumericMonotonicityBreak,
             "interpolated transport map lost monotonicity");
      }
      prev = y;
      if (!(map_derivative(x) > 0.0)) {
        fail(ErrorKind::NumericMonotonicityBreak,
             "interpolated transport map has nonpositive derivative");
      }
    }
    moments_ = compute_moments(*this);
  }

  double map(double x) const {
    const double a = t0_ ? t0_->evaluate_exact(x) : x;
    const double b = t1_ ? t1_->evaluate_exact(x) : x;
    return (1.0 - t_) * a + t_ * b;
  }

  double map_derivative(double x) const {
    const double da = t0_ ? t0_->derivative(x) : 1.0;
    const double db = t1_ ? t1_->derivative(x) : 1.0;
    return (1.0 - t_) * da + t_ * db;
  }

  double invert(double y) const {
    // Bracket in base coordinates, then bisect; the map is monotone.
    double lo = base_.quantile_lower_tail(1e-60);
    double hi = base_.quantile_upper_tail(1e-60);
    if (map(lo) >= y) return lo;
    if (map(hi) <= y) return hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (map(mid) < y) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-13 * (1.0 + std::abs(lo))) break;
    }
    return 0.5 * (lo + hi);
  }

  double density(double y) const override {
    const double x = invert(y);
    const double dy = map_derivative(x);
    if (!(dy > 0)) return 0.0;
    return base_.density(x) / dy;
  }
  double log_density(double y) const override {
    const double x = invert(y);
    const double dy = map_derivative(x);
    if (!(dy > 0)) return -kInf;
    return base_.log_density(x) - std::log(dy);
  }
  double cdf(double y) const override { return base_.cdf(invert(y)); }
  double ccdf(double y) const override { return base_.ccdf(invert(y)); }
  double quantile(double p) const override { return map(base_.quantile(p)); }
  double quantile_lower_tail(double q) const override {
    return map(base_.quantile_lower_tail(q));
  }
  double quantile_upper_tail(double q) const override {
    return map(base_.quantile_upper_tail(q));
  }
  Interval support() const override {
    if (base_.full_support() && full_maps_) return Interval{-kInf, kInf};
    return Interval{map(base_.quantile_lower_tail(1e-60)),
                    map(base_.quantile_upper_tail(1e-60))};
  }
  std::vector<double> x_breakpoints() const override {
    std::vector<double> out;
    for (double p : p_breaks_) out.push_back(map(base_.quantile(p)));
    return out;
  }
  bool smooth_density() const override { return smooth_; }
  bool full_support() const override { return base_.full_support() && full_maps_; }
  std::string describe() const override {
    return "pushforward(" + base_.describe() + ", t=" + std::to_string(t_) + ")";
  }

 private:
  Measure1D base_;
  std::shared_ptr<const TransportMap1D> t0_, t1_;
  double t_;
  std::vector<double> p_breaks_;
  bool smooth_ = true;
  bool full_maps_ = true;
};

Measure1D make_pushforward(Measure1D base, std::shared_ptr<const TransportMap1D> t0,
                           std::shared_ptr<const TransportMap1D> t1, double t) {
  return Measure1D(
      std::make_shared<PushforwardMeasure>(std::move(base), std::move(t0), std::move(t1), t));
}

}  // namespace

std::vector<double> chebyshev_times(int n) {
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) {
    ts[i] = 0.5 * (1.0 - std::cos(M_PI * (i + 1) / (n + 1)));
  }
  return ts;
}

Measure1D interpolate(const Measure1D& mu0, const Measure1D& mu1, double t,
                      std::optional<Measure1D> base, int grid_size) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::DomainError, "interpolation time not in [0,1]");
  if (t == 0.0) return mu0;
  if (t == 1.0) return mu1;
  if (base) {
    auto t0 = std::make_shared<TransportMap1D>(*base, mu0, grid_size);
    auto t1 = std::make_shared<TransportMap1D>(*base, mu1, grid_size);
    return make_pushforward(*base, std::move(t0), std::move(t1), t);
  }
  auto t1 = std::make_shared<TransportMap1D>(mu0, mu1, grid_size);
  return make_pushforward(mu0, nullptr, std::move(t1), t);
}

GeodesicCurve make_geodesic(const Measure1D& mu0, const Measure1D& mu1,
                            std::vector<double> times, int grid_size) {
  GeodesicCurve curve;
  curve.mu0 = mu0;
  curve.mu1 = mu1;
  curve.times = std::move(times);
  std::sort(curve.times.begin(), curve.times.end());
  curve.w2sq = w2_squared(mu0, mu1);
  auto t1 = std::make_shared<TransportMap1D>(mu0, mu1, grid_size);
  for (double t : curve.times) {
    if (t <= 0.0) {
      curve.points.push_back(mu0);
    } else if (t >= 1.0) {
      curve.points.push_back(mu1);
    } else {
      curve.points.push_back(make_pushforward(mu0, nullptr, t1, t));
    }
  }
  return curve;
}

GeodesicCurve make_generalized_geodesic(const Measure1D& mu0, const Measure1D& mu1,
                                        const Measure1D& base, std::vector<double> times,
                                        int grid_size) {
  GeodesicCurve curve;
  curve.mu0 = mu0;
  curve.mu1 = mu1;
  curve.base = base;
  curve.times = std::move(times);
  std::sort(curve.times.begin(), curve.times.end());
  curve.w2sq = w2_squared(mu0, mu1);
  auto t0 = std::make_shared<TransportMap1D>(base, mu0, grid_size);
  auto t1 = std::make_shared<TransportMap1D>(base, mu1, grid_size);
  for (double t : curve.times) {
    if (t <= 0.0) {
      curve.points.push_back(mu0);
    } else if (t >= 1.0) {
      curve.points.push_back(mu1);
    } else {
      curve.points.push_back(make_pushforward(base, t0, t1, t));
    }
  }
  return curve;
}

std::vector<EntropyCurvePoint> entropy_curve(const GeodesicCurve& curve, const Reference& ref) {
  const double e0 = relative_entropy(curve.mu0, ref).value;
  const double e1 = relative_entropy(curve.mu1, ref).value;
  std::vector<EntropyCurvePoint> out;
  out.push_back({0.0, e0, 0.0});
  for (size_t i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i];
    const double e = relative_entropy(curve.points[i], ref).value;
    out.push_back({t, e, (1.0 - t) * e0 + t * e1 - e});
  }
  out.push_back({1.0, e1, 0.0});
  return out;
}

double convexity_modulus(const GeodesicCurve& curve, const Reference& ref) {
  if (!(curve.w2sq > 1e-12)) {
    fail(ErrorKind::DegenerateCurve, "convexity modulus needs W2(mu0, mu1) > 0");
  }
  const auto points = entropy_curve(curve, ref);
  double kappa = kInf;
  for (const auto& p : points) {
    if (p.t <= 0.0 || p.t >= 1.0) continue;
    kappa = std::min(kappa, p.deficit / (0.5 * p.t * (1.0 - p.t) * curve.w2sq));
  }
  return kappa;
}

}  // namespace tal
