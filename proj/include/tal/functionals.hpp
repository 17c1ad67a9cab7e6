#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tal/measure.hpp"

namespace tal {

struct FunctionalReport {
  std::string name;
  double value = 0.0;
  double error_estimate = 0.0;
  bool infinite = false;               // mu not absolutely continuous wrt reference
  bool hypotheses_unverified = false;  // smoothness/H^1 membership not checkable
  bool unreliable = false;             // finite-difference score was unstable
};

/// Reference measure for entropy functionals: either Lebesgue or a measure.
class Reference {
 public:
  static Reference lebesgue() { return Reference(); }
  static Reference measure(Measure1D m) {
    Reference r;
    r.measure_ = std::move(m);
    return r;
  }

  bool is_lebesgue() const { return !measure_.valid(); }
  const Measure1D& get() const { return measure_; }

 private:
  Reference() = default;
  Measure1D measure_;
};

/// Ent_m(mu) = int log(dmu/dm) dmu, integrated in quantile coordinates so the
/// integrand stays bounded for log-concave pairs. With a Lebesgue reference
/// this is the Shannon entropy int rho log rho dx.
FunctionalReport relative_entropy(const Measure1D& mu, const Reference& ref);
FunctionalReport relative_entropy(const Measure1D& mu, const Measure1D& m);

/// Same functional evaluated by direct x-space quadrature; kept as the second
/// route for the change-of-variables cross-check.
FunctionalReport relative_entropy_xspace(const Measure1D& mu, const Reference& ref);

/// I_m(mu) = int (d/dx log(dmu/dm))^2 dmu.
FunctionalReport fisher_information(const Measure1D& mu, const Measure1D& m);

/// alpha_{m,mu}: image of the mode of m under the optimal map to mu,
/// i.e. Q_mu(F_m(xi_m)). Equals the median of mu when m is standard Gaussian.
double levy_point(const Measure1D& m, const Measure1D& mu);

struct PhiReport {
  double phi = 0.0;                        // full correction Phi(m, mu, nu)
  std::optional<double> phi_gaussian_min;  // min{Phi, -bary(mu) bary(nu)} when m = gamma_1
  double alpha_mu = 0.0;
  double alpha_nu = 0.0;
  double quadratic_part = 0.0;  // the two squared terms (cancel when xi_m = 0)
};

/// The barycenter/Levy-point correction term of the refined symmetrized
/// transport inequality.
PhiReport phi_correction(const Measure1D& m, const Measure1D& mu, const Measure1D& nu);

/// Mean/variance when the measure is an analytic Gaussian.
std::optional<std::pair<double, double>> as_gaussian(const Measure1D& m);
bool is_standard_gaussian(const Measure1D& m, double tol = 1e-12);

}  // namespace tal
