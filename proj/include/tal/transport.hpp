#pragma once

#include <span>
#include <vector>

#include "tal/expr.hpp"
#include "tal/measure.hpp"

namespace tal {

/// K probabilities on (eps, 1-eps) with Chebyshev spacing, which concentrates
/// grid points where quantile integrands are hardest (both tails).
std::vector<double> chebyshev_probability_grid(int k, double eps = 1e-6);

/// Monotone optimal transport map between two 1D measures on a quantile grid.
///
/// T(x_i) = Q_target(p_i) at x_i = Q_source(p_i). Off-grid evaluation uses a
/// monotone interpolant; T' always comes from the density ratio of the
/// change-of-variables identity, never from differencing T.
class TransportMap1D {
 public:
  TransportMap1D(Measure1D source, Measure1D target, int grid_size);

  const Measure1D& source() const { return source_; }
  const Measure1D& target() const { return target_; }
  int grid_size() const { return static_cast<int>(probabilities_.size()); }

  std::span<const double> probabilities() const { return probabilities_; }
  std::span<const double> source_points() const { return xs_; }
  std::span<const double> map_values() const { return ts_; }
  std::span<const double> derivative_values() const { return dts_; }

  /// Monotone piecewise-cubic interpolant of the grid values.
  double operator()(double x) const;

  /// Exact evaluation Q_target(F_source(x)).
  double evaluate_exact(double x) const;

  /// T'(x) from the density ratio rho_source(x) / rho_target(T(x)).
  double derivative(double x) const;

  /// False when the source violates the full-support/smoothness hypotheses of
  /// the 1D transport theorem (restricted or grid-backed sources).
  bool hypotheses_ok() const { return hypotheses_ok_; }

 private:
  Measure1D source_, target_;
  std::vector<double> probabilities_, xs_, ts_, dts_;
  std::vector<double> slopes_;  // Fritsch-Carlson tangents for interpolation
  bool hypotheses_ok_ = true;
};

TransportMap1D optimal_map(const Measure1D& source, const Measure1D& target,
                           int grid_size = 512);

/// Wasserstein distance via quantile quadrature with tail-substituted pieces.
double w2(const Measure1D& mu, const Measure1D& nu);
double w2_squared(const Measure1D& mu, const Measure1D& nu);

/// Independent x-space route: int (T(x) - x)^2 dmu with T = Q_nu o F_mu.
double w2_squared_xspace(const Measure1D& mu, const Measure1D& nu);

struct MaResidualReport {
  /// sup over the grid of |rho_src - rho_tgt(T) T'_geom| / max(rho_src, 1e-12)
  /// with T'_geom from second-order differencing of the map values.
  double residual = 0.0;
  /// T' table from the density-ratio identity.
  std::vector<double> derivative;
  /// Target density underflowed under a live source density somewhere.
  bool overflow_flagged = false;
};

MaResidualReport ma_residual(const TransportMap1D& map);

struct ContractionReport {
  double sup_derivative = 0.0;
  double bound = 0.0;  // sqrt(kappa0 / kappa1)
  bool holds = false;
  bool tight = false;
  bool monotone = false;
  bool hypotheses_ok = true;
};

/// Checks sup T' <= sqrt(kappa0/kappa1) for a declared upper bound kappa0 on
/// the source potential curvature and lower bound kappa1 on the target's.
ContractionReport contraction_check(const TransportMap1D& map, double kappa0, double kappa1);

/// Dual candidate pair for the quadratic-cost duality with margin
/// (x - y)^2 - f(x) - g(y).
class DualPair {
 public:
  DualPair(Expr f, Expr g) : f_(std::move(f)), g_(std::move(g)) {}

  double f(double x) const { return f_(x); }
  double g(double y) const { return g_(y); }
  double margin(double x, double y) const { return (x - y) * (x - y) - f_(x) - g_(y); }

 private:
  Expr f_, g_;
};

struct DualGapReport {
  double dual_value = 0.0;
  double w2sq = 0.0;
  double gap = 0.0;  // w2sq - dual_value
};

/// Evaluates int f dmu + int g dnu for an admissible pair; admissibility is
/// sampled on a 201x201 tensor grid over the central mass of the marginals and
/// a violation throws InadmissiblePair naming the witness point.
DualGapReport dual_gap(const DualPair& pair, const Measure1D& mu, const Measure1D& nu);

}  // namespace tal
