#pragma once

#include <optional>
#include <vector>

#include "tal/functionals.hpp"
#include "tal/measure.hpp"
#include "tal/transport.hpp"

namespace tal {

/// 21 Chebyshev-spaced interior times in (0,1); convexity deficits vanish
/// quadratically at the endpoints, so the modulus binds in the interior.
std::vector<double> chebyshev_times(int n = 21);

/// Displacement interpolation mu_t = ((1-t) id + t T)_# mu0, or the
/// generalized geodesic ((1-t) T0 + t T1)_# base when a base is given.
/// The endpoints are returned exactly. The interpolated measure evaluates its
/// density through the 1D change-of-variables identity along the monotone map.
Measure1D interpolate(const Measure1D& mu0, const Measure1D& mu1, double t,
                      std::optional<Measure1D> base = std::nullopt, int grid_size = 512);

struct GeodesicCurve {
  Measure1D mu0, mu1;
  std::optional<Measure1D> base;
  std::vector<double> times;     // interior evaluation times
  std::vector<Measure1D> points;  // interpolants at `times`
  double w2sq = 0.0;              // W_2^2(mu0, mu1)
};

GeodesicCurve make_geodesic(const Measure1D& mu0, const Measure1D& mu1,
                            std::vector<double> times = chebyshev_times(),
                            int grid_size = 512);

GeodesicCurve make_generalized_geodesic(const Measure1D& mu0, const Measure1D& mu1,
                                        const Measure1D& base,
                                        std::vector<double> times = chebyshev_times(),
                                        int grid_size = 512);

struct EntropyCurvePoint {
  double t = 0.0;
  double entropy = 0.0;
  double deficit = 0.0;  // (1-t) E(0) + t E(1) - E(t)
};

/// Entropy along the curve, including the exact endpoints at t = 0 and 1.
std::vector<EntropyCurvePoint> entropy_curve(const GeodesicCurve& curve, const Reference& ref);

/// Largest kappa such that the curve is kappa-convex in the sampled sense:
/// min over interior t of deficit(t) / (t (1-t) W2^2 / 2).
double convexity_modulus(const GeodesicCurve& curve, const Reference& ref);

}  // namespace tal
