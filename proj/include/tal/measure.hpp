#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tal/common.hpp"
#include "tal/expr.hpp"
#include "tal/quadrature.hpp"

namespace tal {

/// A potential V defining the log-concave-style measure e^{-V} dx.
///
/// Carries V, V', V'' as callables plus optional two-sided convexity bounds
/// kappa_lo <= V'' <= kappa_hi and a minimizer hint. Derivatives of the
/// expression-backed and polynomial families are exact.
class PotentialSpec {
 public:
  /// V(x) = 0.5 * curvature * (x - center)^2 + offset.
  static PotentialSpec quadratic(double center, double curvature, double offset = 0.0);

  /// V(x) = sum_k coeffs[k] * x^k.
  static PotentialSpec polynomial(std::vector<double> coeffs);

  /// V given as a parsed expression in x; derivatives are symbolic.
  static PotentialSpec from_expr(const Expr& v, std::optional<double> hint = std::nullopt);

  /// Arbitrary callables. The constructor cross-checks dv against a central
  /// difference of v on a sample grid.
  static PotentialSpec custom(Fn1 v, Fn1 dv, Fn1 d2v,
                              std::optional<double> hint = std::nullopt,
                              std::string label = "custom");

  double operator()(double x) const { return v_(x); }
  double deriv(double x) const { return dv_(x); }
  double second_deriv(double x) const { return d2v_(x); }

  const std::string& family() const { return family_; }
  std::optional<double> kappa_lower() const { return kappa_lo_; }
  std::optional<double> kappa_upper() const { return kappa_hi_; }
  std::optional<double> minimizer_hint() const { return hint_; }

  PotentialSpec& with_bounds(std::optional<double> kappa_lo, std::optional<double> kappa_hi);
  PotentialSpec& with_hint(double hint);

  /// Verifies the declared bounds and the V'/V consistency invariant on the
  /// given sample points. Throws InvalidPotential on NaN, MissingBounds on a
  /// bound violated beyond tolerance.
  void spot_check(std::span<const double> xs, double tol = 1e-6) const;

 private:
  PotentialSpec() = default;
  std::string family_;
  Fn1 v_, dv_, d2v_;
  std::optional<double> kappa_lo_, kappa_hi_, hint_;
};

/// Ordered finite union of disjoint closed intervals (endpoints may be inf).
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> intervals);
  static IntervalSet whole_line();
  static IntervalSet single(double lo, double hi);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  bool contains(double x) const;
  bool is_whole_line() const;

  /// inf |a - b| over a in this, b in other.
  double distance_to(const IntervalSet& other) const;

  /// Mirror image {-x : x in A}.
  IntervalSet mirrored() const;

  std::string describe() const;

 private:
  std::vector<Interval> intervals_;
};

struct Moments {
  double barycenter = 0.0;
  double second_moment = 0.0;
  double mode = 0.0;        // valid only when !mode_ambiguous
  bool mode_ambiguous = false;
};

/// Abstract immutable one-dimensional probability measure.
///
/// All caches are built during construction; every method is const and
/// reentrant, so instances can be shared freely across threads.
class Measure {
 public:
  virtual ~Measure() = default;

  virtual double density(double x) const = 0;
  virtual double log_density(double x) const = 0;
  virtual double cdf(double x) const = 0;
  /// Upper tail mass P(X > x), computed without 1 - cdf cancellation.
  virtual double ccdf(double x) const = 0;
  virtual double quantile(double p) const = 0;
  /// Solves cdf(x) = q with relative accuracy for tiny q.
  virtual double quantile_lower_tail(double q) const { return quantile(q); }
  /// Solves ccdf(x) = q with relative accuracy for tiny q.
  virtual double quantile_upper_tail(double q) const { return quantile(1.0 - q); }

  virtual Interval support() const = 0;
  /// x-locations where the density is not smooth (kinks, jumps).
  virtual std::vector<double> x_breakpoints() const { return {}; }

  /// d/dx log density and its derivative; analytic when available.
  virtual double log_density_derivative(double x) const;
  virtual double log_density_second_derivative(double x) const;
  virtual bool has_analytic_score() const { return false; }

  /// Convexity bounds of -log density when known.
  virtual std::optional<double> convexity_lower() const { return std::nullopt; }
  virtual std::optional<double> convexity_upper() const { return std::nullopt; }

  /// True when the density is given in closed form smooth enough for the
  /// smoothness hypotheses to be checkable (not grid data, no jumps).
  virtual bool smooth_density() const { return true; }
  virtual bool full_support() const { return false; }

  virtual std::string describe() const = 0;

  const Moments& cached_moments() const { return moments_; }

 protected:
  Moments moments_;
};

/// Value handle for measures; cheap to copy and share.
class Measure1D {
 public:
  Measure1D() = default;
  explicit Measure1D(std::shared_ptr<const Measure> impl) : impl_(std::move(impl)) {}

  static Measure1D gaussian(double mean, double variance);

  /// Normalizes e^{-V} into a probability measure (computes logZ).
  static Measure1D from_potential(const PotentialSpec& potential,
                                  std::optional<Interval> domain_hint = std::nullopt);

  /// Piecewise-linear density on the given nodes, normalized at construction.
  static Measure1D grid(std::vector<double> nodes, std::vector<double> values);

  /// Conditional measure m( . | A).
  Measure1D restricted(const IntervalSet& a) const;

  /// Exponential tilt e^{kappa F} m / int e^{kappa F} dm.
  Measure1D tilted(const Expr& tilt_fn, double kappa) const;

  /// Pushforward under x -> x + a.
  Measure1D translated(double a) const;

  bool valid() const { return impl_ != nullptr; }
  const Measure& impl() const { return *impl_; }
  std::shared_ptr<const Measure> shared() const { return impl_; }

  double density(double x) const { return impl_->density(x); }
  double log_density(double x) const { return impl_->log_density(x); }
  double cdf(double x) const { return impl_->cdf(x); }
  double ccdf(double x) const { return impl_->ccdf(x); }
  double quantile(double p) const;
  double quantile_lower_tail(double q) const { return impl_->quantile_lower_tail(q); }
  double quantile_upper_tail(double q) const { return impl_->quantile_upper_tail(q); }
  Interval support() const { return impl_->support(); }
  std::vector<double> x_breakpoints() const { return impl_->x_breakpoints(); }
  double log_density_derivative(double x) const { return impl_->log_density_derivative(x); }
  double log_density_second_derivative(double x) const {
    return impl_->log_density_second_derivative(x);
  }
  std::optional<double> convexity_lower() const { return impl_->convexity_lower(); }
  std::optional<double> convexity_upper() const { return impl_->convexity_upper(); }
  bool smooth_density() const { return impl_->smooth_density(); }
  bool full_support() const { return impl_->full_support(); }
  std::string describe() const { return impl_->describe(); }

  double barycenter() const { return impl_->cached_moments().barycenter; }
  double second_moment() const { return impl_->cached_moments().second_moment; }

  /// Density maximizer; throws AmbiguousMode when not unique.
  double mode() const;

  /// (barycenter, second moment, mode); throws AmbiguousMode.
  Moments moments() const;

  /// Breakpoints mapped to probability coordinates.
  std::vector<double> p_breakpoints() const;

  /// Log of the normalization constant for potential-backed measures.
  std::optional<double> log_norm_constant() const;

  /// log int e^{kappa F} dm, stored by tilt().
  std::optional<double> log_tilt_integral() const;

  bool same_object(const Measure1D& other) const { return impl_ == other.impl_; }

 private:
  std::shared_ptr<const Measure> impl_;
};

/// int g(x) dmu computed in quantile coordinates with tail-stable evaluation.
/// Valid for integrands with at most sqrt-log growth in the tails.
QuadResult integrate_against(const Measure1D& mu, const Fn1& g, double rel_tol = 1e-11);

/// Mass of one interval under the measure, choosing the better-conditioned of
/// the CDF/CCDF differences and falling back to direct quadrature for slivers.
double stable_interval_mass(const Measure1D& m, double lo, double hi);

/// Total mass of an interval set.
double mass_of(const Measure1D& m, const IntervalSet& a);

/// Generic moment/mode computation used by the quadrature-backed variants.
Moments compute_moments(const Measure& measure, double mode_search_tol_d = 1e-9);

}  // namespace tal
