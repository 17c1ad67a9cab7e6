#include "tal/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tal/transport.hpp"

namespace tal {

namespace {

constexpr double kBaryTol = 1e-6;
constexpr double kMomentTol = 1e-8;

struct BoundCheck {
  double value = 0.0;
  bool verifiable = true;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

bool density_symmetric(const Measure1D& m) {
  double max_rho = 0.0, worst = 0.0;
  for (int i = 1; i <= 41; ++i) {
    const double p = 0.02 + 0.96 * (i - 1) / 40.0;
    const double x = m.quantile(p);
    const double r1 = m.density(x);
    const double r2 = m.density(-x);
    max_rho = std::max({max_rho, r1, r2});
    worst = std::max(worst, std::abs(r1 - r2));
  }
  return worst <= 1e-8 * std::max(max_rho, 1e-300);
}

void require_barycenters_match(const Measure1D& a, const Measure1D& b, const char* what) {
  if (std::abs(a.barycenter() - b.barycenter()) > kBaryTol) {
    fail(ErrorKind::HypothesisError,
         std::string(what) + ": barycenters differ (" + fmt(a.barycenter()) + " vs " +
             fmt(b.barycenter()) + ")");
  }
}

double ent_value(const FunctionalReport& r, const char* what) {
  if (r.infinite) {
    fail(ErrorKind::HypothesisError, std::string(what) + " has infinite relative entropy");
  }
  return r.value;
}

}  // namespace

const char* symmetrized_variant_name(SymmetrizedVariant v) {
  switch (v) {
    case SymmetrizedVariant::STI1: return "sti1";
    case SymmetrizedVariant::STI2: return "sti2";
    case SymmetrizedVariant::SSTI: return "ssti";
    case SymmetrizedVariant::MC1: return "mc1";
    case SymmetrizedVariant::MC2: return "mc2";
    case SymmetrizedVariant::RSTI: return "rsti";
  }
  return "?";
}

const char* hwi_lsi_variant_name(HwiLsiVariant v) {
  switch (v) {
    case HwiLsiVariant::HWI: return "hwi";
    case HwiLsiVariant::LSI: return "lsi";
    case HwiLsiVariant::HWI_C13: return "hwi_c13";
    case HwiLsiVariant::LSI_C13: return "lsi_c13";
    case HwiLsiVariant::HWI_C21: return "hwi_c21";
    case HwiLsiVariant::LSI_C21: return "lsi_c21";
  }
  return "?";
}

const char* lemma_variant_name(LemmaVariant v) {
  switch (v) {
    case LemmaVariant::OddSymmetric: return "lemma_odd";
    case LemmaVariant::GaussianCentered: return "lemma_centered";
    case LemmaVariant::General: return "lemma_general";
  }
  return "?";
}

void check_declared_bound(const Measure1D& m, double value, bool lower,
                          const std::string& what) {
  if (!(value > 0)) fail(ErrorKind::MissingBounds, what + " must be positive");
  if (!m.smooth_density()) return;  // not checkable; caller flags hypotheses
  const double tol = 1e-6 * std::max(1.0, value);
  for (int i = 0; i <= 40; ++i) {
    const double p = 0.02 + 0.96 * i / 40.0;
    const double x = m.quantile(p);
    const double v2 = -m.log_density_second_derivative(x);
    if (lower && v2 < value - tol) {
      fail(ErrorKind::MissingBounds, what + " = " + fmt(value) +
                                         " is not a lower curvature bound: V''(" + fmt(x) +
                                         ") = " + fmt(v2));
    }
    if (!lower && v2 > value + tol) {
      fail(ErrorKind::MissingBounds, what + " = " + fmt(value) +
                                         " is not an upper curvature bound: V''(" + fmt(x) +
                                         ") = " + fmt(v2));
    }
  }
}

double require_kappa_lower(const Measure1D& m, const std::optional<double>& declared,
                           const std::string& what) {
  if (declared) {
    check_declared_bound(m, *declared, true, what);
    return *declared;
  }
  if (auto k = m.convexity_lower()) return *k;
  fail(ErrorKind::MissingBounds, what + ": no lower convexity bound declared or intrinsic");
}

double require_kappa_upper(const Measure1D& m, const std::optional<double>& declared,
                           const std::string& what) {
  if (declared) {
    check_declared_bound(m, *declared, false, what);
    return *declared;
  }
  if (auto k = m.convexity_upper()) return *k;
  fail(ErrorKind::MissingBounds, what + ": no upper convexity bound declared or intrinsic");
}

Certificate verify_talagrand(const Measure1D& m, const Measure1D& mu,
                             const DeclaredBounds& bounds, Tolerances tol) {
  const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
  FunctionalReport ent = relative_entropy(mu, m);
  const double lhs = 0.5 * w2_squared(mu, m);
  const double rhs = ent_value(ent, "mu") / kappa;
  const bool hyp = m.smooth_density() && !ent.hypotheses_unverified;
  return make_certificate("talagrand", "m=" + m.describe() + ", mu=" + mu.describe(), lhs,
                          rhs, tol, ent.error_estimate + 1e-10, hyp, {ent});
}

Certificate verify_symmetrized(SymmetrizedVariant variant, const Measure1D& m,
                               const Measure1D& mu, const Measure1D& nu,
                               const DeclaredBounds& bounds, Tolerances tol) {
  std::vector<std::string> notes;
  std::vector<FunctionalReport> reports;
  bool hyp = m.smooth_density();
  const double lhs = 0.5 * w2_squared(mu, nu);
  double rhs = 0.0;

  switch (variant) {
    case SymmetrizedVariant::STI1: {
      const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
      if (!density_symmetric(m)) {
        fail(ErrorKind::HypothesisError, "reference measure is not symmetric");
      }
      if (!density_symmetric(nu)) {
        fail(ErrorKind::HypothesisError, "nu is not symmetric");
      }
      FunctionalReport e1 = relative_entropy(mu, m), e2 = relative_entropy(nu, m);
      rhs = (ent_value(e1, "mu") + ent_value(e2, "nu")) / kappa;
      reports = {e1, e2};
      break;
    }
    case SymmetrizedVariant::STI2: {
      if (!is_standard_gaussian(m)) {
        fail(ErrorKind::HypothesisError, "centered variant requires the standard Gaussian reference");
      }
      if (std::abs(nu.barycenter()) > kBaryTol) {
        fail(ErrorKind::HypothesisError,
             "bary(nu) = " + fmt(nu.barycenter()) + " != 0");
      }
      FunctionalReport e1 = relative_entropy(mu, m), e2 = relative_entropy(nu, m);
      rhs = ent_value(e1, "mu") + ent_value(e2, "nu");
      reports = {e1, e2};
      break;
    }
    case SymmetrizedVariant::SSTI: {
      if (!is_standard_gaussian(m)) {
        fail(ErrorKind::HypothesisError,
             "barycenter-corrected variant requires the standard Gaussian reference");
      }
      FunctionalReport e1 = relative_entropy(mu, m), e2 = relative_entropy(nu, m);
      rhs = ent_value(e1, "mu") + ent_value(e2, "nu") - mu.barycenter() * nu.barycenter();
      reports = {e1, e2};
      break;
    }
    case SymmetrizedVariant::MC1: {
      require_barycenters_match(mu, nu, "mc1");
      const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
      if (!bounds.kappa0) fail(ErrorKind::MissingBounds, "mc1 needs kappa0 (upper, mu0)");
      check_declared_bound(mu, *bounds.kappa0, false, "kappa0(mu0)");
      const double kappa0 = *bounds.kappa0;
      const double kappa1 = require_kappa_lower(nu, bounds.kappa1, "kappa1(mu1)");
      double c;
      if (bounds.c_mu0) {
        c = *bounds.c_mu0;
      } else if (bounds.kappa2) {
        check_declared_bound(mu, *bounds.kappa2, true, "kappa2(mu0)");
        c = *bounds.kappa2;
        notes.push_back("C_{mu0} taken as the declared kappa2 lower bound");
      } else {
        c = require_kappa_lower(mu, std::nullopt, "kappa_lo(mu0)");
        notes.push_back("C_{mu0} defaulted to kappa_lo(mu0)");
      }
      hyp = hyp && mu.smooth_density() && nu.smooth_density();
      FunctionalReport e1 = relative_entropy(mu, m), e2 = relative_entropy(nu, m);
      rhs = 2.0 * (ent_value(e1, "mu0") + ent_value(e2, "mu1")) /
            (kappa + c * std::min(1.0, kappa1 / kappa0));
      reports = {e1, e2};
      break;
    }
    case SymmetrizedVariant::MC2: {
      require_barycenters_match(mu, nu, "mc2");
      const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
      const double kappa_prime = require_kappa_upper(m, bounds.kappa_prime, "kappa'(m)");
      if (!bounds.kappa0) fail(ErrorKind::MissingBounds, "mc2 needs kappa0 (lower, mu0)");
      check_declared_bound(mu, *bounds.kappa0, true, "kappa0(mu0)");
      const double kappa0 = *bounds.kappa0;
      const double kappa1 = require_kappa_lower(nu, bounds.kappa1, "kappa1(mu1)");
      hyp = hyp && mu.smooth_density() && nu.smooth_density();
      FunctionalReport e1 = relative_entropy(mu, m), e2 = relative_entropy(nu, m);
      rhs = (2.0 / kappa) * (ent_value(e1, "mu0") + ent_value(e2, "mu1")) /
            (1.0 + std::min(kappa0 / kappa_prime, kappa1 / kappa_prime));
      reports = {e1, e2};
      break;
    }
    case SymmetrizedVariant::RSTI: {
      const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
      FunctionalReport e1 = relative_entropy(mu, m), e2 = relative_entropy(nu, m);
      PhiReport phi = phi_correction(m, mu, nu);
      double phi_used = phi.phi;
      if (phi.phi_gaussian_min && kappa == 1.0) {
        phi_used = *phi.phi_gaussian_min;
        notes.push_back("Gaussian reference: using min{Phi, -bary(mu) bary(nu)}");
      }
      rhs = (ent_value(e1, "mu") + ent_value(e2, "nu")) / kappa + phi_used;
      FunctionalReport phi_report;
      phi_report.name = "phi_correction";
      phi_report.value = phi_used;
      reports = {e1, e2, phi_report};
      break;
    }
  }

  double err = 1e-10;
  for (const auto& r : reports) err += r.error_estimate;
  for (const auto& r : reports) hyp = hyp && !r.hypotheses_unverified;
  const std::string instance =
      "m=" + m.describe() + ", mu=" + mu.describe() + ", nu=" + nu.describe();
  return make_certificate(symmetrized_variant_name(variant), instance, lhs, rhs, tol, err,
                          hyp, std::move(reports), std::move(notes));
}

Certificate verify_hwi_lsi(HwiLsiVariant variant, const Measure1D& m, const Measure1D& mu,
                           const DeclaredBounds& bounds, Tolerances tol) {
  const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
  FunctionalReport ent = relative_entropy(mu, m);
  FunctionalReport fisher = fisher_information(mu, m);
  const double ent_v = ent_value(ent, "mu");
  const double fisher_v = fisher.value;
  std::vector<std::string> notes;
  bool hyp = m.smooth_density() && mu.smooth_density();

  const bool needs_w2 = variant == HwiLsiVariant::HWI || variant == HwiLsiVariant::HWI_C13 ||
                        variant == HwiLsiVariant::HWI_C21;
  const double w = needs_w2 ? w2(mu, m) : 0.0;

  double rhs = 0.0;
  switch (variant) {
    case HwiLsiVariant::HWI:
      rhs = w * std::sqrt(fisher_v) - 0.5 * kappa * w * w;
      break;
    case HwiLsiVariant::LSI:
      rhs = fisher_v / (2.0 * kappa);
      break;
    case HwiLsiVariant::HWI_C13:
    case HwiLsiVariant::LSI_C13: {
      require_barycenters_match(m, mu, "refined hwi/lsi");
      if (!bounds.tau) fail(ErrorKind::MissingBounds, "refined variant needs tau (upper, mu)");
      check_declared_bound(mu, *bounds.tau, false, "tau(mu)");
      double c;
      if (bounds.c_mu) {
        c = *bounds.c_mu;
      } else {
        c = require_kappa_lower(mu, std::nullopt, "kappa_lo(mu)");
        notes.push_back("C_mu defaulted to kappa_lo(mu)");
      }
      const double gain = c * std::min(1.0, kappa / *bounds.tau);
      if (variant == HwiLsiVariant::HWI_C13) {
        rhs = w * std::sqrt(fisher_v) - 0.5 * (kappa + gain) * w * w;
      } else {
        rhs = 0.5 * fisher_v / (kappa + gain);
      }
      break;
    }
    case HwiLsiVariant::HWI_C21:
    case HwiLsiVariant::LSI_C21: {
      require_barycenters_match(m, mu, "refined hwi/lsi");
      const double kappa_prime = require_kappa_upper(m, bounds.kappa_prime, "kappa'(m)");
      if (!bounds.tau) fail(ErrorKind::MissingBounds, "refined variant needs tau (lower, mu)");
      check_declared_bound(mu, *bounds.tau, true, "tau(mu)");
      const double boost = 1.0 + std::min(kappa / kappa_prime, *bounds.tau / kappa_prime);
      if (variant == HwiLsiVariant::HWI_C21) {
        rhs = w * std::sqrt(fisher_v) - 0.5 * kappa * boost * w * w;
      } else {
        rhs = 0.5 * fisher_v / (kappa * boost);
      }
      break;
    }
  }

  hyp = hyp && !ent.hypotheses_unverified && !fisher.hypotheses_unverified;
  if (fisher.unreliable) notes.push_back("Fisher information used an unstable FD fallback");
  const std::string instance = "m=" + m.describe() + ", mu=" + mu.describe();
  return make_certificate(hwi_lsi_variant_name(variant), instance, ent_v, rhs, tol,
                          ent.error_estimate + fisher.error_estimate + 1e-10, hyp,
                          {ent, fisher}, std::move(notes));
}

Certificate verify_poincare(PoincareVariant variant, const Measure1D& m, const Expr& f,
                            const DeclaredBounds& bounds, Tolerances tol) {
  const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
  const Expr df = f.derivative();
  const double mean_f = integrate_against(m, [&](double x) { return f(x); }).value;
  if (std::abs(mean_f) > kMomentTol) {
    fail(ErrorKind::HypothesisError, "int f dm = " + fmt(mean_f) + " != 0");
  }
  std::vector<std::string> notes;
  bool refined = variant == PoincareVariant::Refined;
  double constant = kappa;
  std::string id = "poincare";
  if (refined) {
    const double mean_xf = integrate_against(m, [&](double x) { return x * f(x); }).value;
    if (std::abs(mean_xf) > kMomentTol) {
      notes.push_back("refined variant refused: int x f dm = " + fmt(mean_xf) +
                      " != 0; routed to the base inequality");
      refined = false;
    } else {
      const double kappa_prime = require_kappa_upper(m, bounds.kappa_prime, "kappa'(m)");
      constant = kappa * (1.0 + kappa / kappa_prime);
      id = "poincare_refined";
    }
  }
  QuadResult f2 = integrate_against(m, [&](double x) { return f(x) * f(x); });
  QuadResult df2 = integrate_against(m, [&](double x) {
    const double d = df(x);
    return d * d;
  });
  const double lhs = constant * f2.value;
  const double rhs = df2.value;
  bool hyp = m.smooth_density();
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) hyp = false;
  const std::string instance = "m=" + m.describe() + ", f=" + f.to_string();
  return make_certificate(id, instance, lhs, rhs, tol,
                          constant * f2.error_estimate + df2.error_estimate, hyp, {},
                          std::move(notes));
}

Certificate verify_lemma_core(LemmaVariant variant, const Measure1D& m, const Expr& f,
                              const Expr& g, const DeclaredBounds& bounds, Tolerances tol) {
  const Expr df = f.derivative();
  const Expr dg = g.derivative();

  // Strict monotonicity of f and g on a sampled grid.
  {
    double prev_f = -kInf, prev_g = -kInf, prev_x = -kInf;
    for (int i = 0; i <= 200; ++i) {
      const double p = 0.005 + 0.99 * i / 200.0;
      const double x = m.quantile(p);
      if (x <= prev_x) continue;
      const double fx = f(x), gx = g(x);
      if (fx <= prev_f || gx <= prev_g) {
        fail(ErrorKind::NotMonotone,
             "f or g not strictly increasing near x = " + fmt(x));
      }
      prev_f = fx;
      prev_g = gx;
      prev_x = x;
    }
  }

  auto integral = [&](const Fn1& h) { return integrate_against(m, h); };
  auto v_prime = [&](double x) { return -m.log_density_derivative(x); };

  double expression = 0.0;
  double rhs_display = 0.0;
  double err = 0.0;
  std::vector<std::string> notes;
  notes.push_back("inequality stored as lhs <= rhs with rhs the display's left side");

  QuadResult log_term = integral([&](double x) { return std::log(df(x) * dg(x)); });
  QuadResult fg_term = integral([&](double x) { return f(x) * g(x); });
  err += log_term.error_estimate + fg_term.error_estimate;

  switch (variant) {
    case LemmaVariant::OddSymmetric: {
      const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
      if (!density_symmetric(m)) {
        fail(ErrorKind::HypothesisError, "reference potential is not even");
      }
      double odd_defect = 0.0;
      for (int i = 1; i <= 20; ++i) {
        const double x = m.quantile(0.5 + 0.49 * i / 20.0);
        odd_defect = std::max(odd_defect, std::abs(f(x) + f(-x)));
      }
      if (odd_defect > 1e-8 * std::max(1.0, std::abs(f(1.0)))) {
        fail(ErrorKind::HypothesisError, "f is not odd");
      }
      QuadResult cross = integral(
          [&](double x) { return (f(x) + g(x)) * (v_prime(x) - kappa * x); });
      QuadResult xv = integral([&](double x) { return x * v_prime(x); });
      QuadResult x2 = integral([&](double x) { return x * x; });
      err += cross.error_estimate + xv.error_estimate + x2.error_estimate;
      expression = -log_term.value + kappa * fg_term.value + cross.value - 2.0 * xv.value +
                   kappa * x2.value;
      break;
    }
    case LemmaVariant::GaussianCentered: {
      if (!is_standard_gaussian(m)) {
        fail(ErrorKind::HypothesisError, "centered variant requires the standard Gaussian");
      }
      const double mean_f = integral([&](double x) { return f(x); }).value;
      if (std::abs(mean_f) > kMomentTol) {
        fail(ErrorKind::HypothesisError, "int f dgamma = " + fmt(mean_f) + " != 0");
      }
      expression = -log_term.value + fg_term.value - 1.0;
      break;
    }
    case LemmaVariant::General: {
      const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
      const double xi = m.mode();
      const double a = f(xi), b = g(xi);
      QuadResult cross = integral([&](double x) {
        return (f(x) + g(x)) * (v_prime(x) - kappa * x + kappa * xi);
      });
      QuadResult xv = integral([&](double x) { return x * v_prime(x); });
      QuadResult x2 = integral([&](double x) { return (x - xi) * (x - xi); });
      QuadResult mean_f = integral([&](double x) { return f(x); });
      QuadResult mean_g = integral([&](double x) { return g(x); });
      err += cross.error_estimate + xv.error_estimate + x2.error_estimate +
             mean_f.error_estimate + mean_g.error_estimate;
      expression = -log_term.value + kappa * fg_term.value + cross.value - 2.0 * xv.value +
                   kappa * x2.value;
      rhs_display = kappa * (b * mean_f.value + a * mean_g.value - a * b -
                             (a + b) * (m.barycenter() - xi));
      break;
    }
  }

  const bool hyp = m.smooth_density();
  const std::string instance =
      "m=" + m.describe() + ", f=" + f.to_string() + ", g=" + g.to_string();
  return make_certificate(lemma_variant_name(variant), instance, rhs_display, expression, tol,
                          err + 1e-12, hyp, {}, std::move(notes));
}

Certificate verify_concentration(const Measure1D& m, const IntervalSet& a,
                                 const IntervalSet& b, const DeclaredBounds& bounds,
                                 Tolerances tol) {
  const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
  const double xi = m.mode();
  if (std::abs(xi) > 1e-8) {
    fail(ErrorKind::HypothesisError, "mode of the reference is " + fmt(xi) + ", not 0");
  }
  const Measure1D mu_a = m.restricted(a);
  const Measure1D mu_b = m.restricted(b);
  const double mass_a = mass_of(m, a);
  const double mass_b = mass_of(m, b);
  const double dist = a.distance_to(b);

  PhiReport phi = phi_correction(m, mu_a, mu_b);
  const double bary_a = mu_a.barycenter();
  const double bary_b = mu_b.barycenter();
  // The mode sits at 0, so the quadratic terms cancel and the correction is
  // the four-term expression with the bary(m) cross term.
  const double phi_zero_mode = -phi.alpha_nu * bary_a - phi.alpha_mu * bary_b +
                               phi.alpha_mu * phi.alpha_nu +
                               (phi.alpha_mu + phi.alpha_nu) * m.barycenter();
  double phi_used = phi_zero_mode;
  std::vector<std::string> notes;
  if (is_standard_gaussian(m) && kappa == 1.0) {
    phi_used = std::min(phi_zero_mode, -bary_a * bary_b);
    notes.push_back("Gaussian reference: using min{Phi(A,B), -bary(A) bary(B)}");
  }

  const double lhs = mass_a * mass_b;
  const double rhs = std::exp(-0.5 * kappa * dist * dist + kappa * phi_used);

  std::vector<FunctionalReport> reports;
  FunctionalReport fr;
  fr.name = "phi_correction";
  fr.value = phi_used;
  reports.push_back(fr);
  fr.name = "mass_A";
  fr.value = mass_a;
  reports.push_back(fr);
  fr.name = "mass_B";
  fr.value = mass_b;
  reports.push_back(fr);
  fr.name = "distance";
  fr.value = dist;
  reports.push_back(fr);

  const bool hyp = m.smooth_density();
  const std::string instance =
      "m=" + m.describe() + ", A=" + a.describe() + ", B=" + b.describe();
  return make_certificate("concentration", instance, lhs, rhs, tol, 1e-9, hyp,
                          std::move(reports), std::move(notes));
}

Certificate verify_blaschke_santalo(const Measure1D& m, const Expr& f_fn, const Expr& g_fn,
                                    const DeclaredBounds& bounds, Tolerances tol) {
  const double kappa = require_kappa_lower(m, bounds.kappa, "kappa(m)");
  const double xi = m.mode();
  if (std::abs(xi) > 1e-8) {
    fail(ErrorKind::HypothesisError, "mode of the reference is " + fmt(xi) + ", not 0");
  }
  // Admissibility F(x) + G(y) <= (x - y)^2 / 2 on a deterministic product grid
  // over the central mass of the reference.
  const int n = 201;
  for (int i = 0; i < n; ++i) {
    const double px = 5e-5 + (1.0 - 1e-4) * i / (n - 1);
    const double x = m.quantile(px);
    for (int j = 0; j < n; ++j) {
      const double y = m.quantile(5e-5 + (1.0 - 1e-4) * j / (n - 1));
      const double margin = 0.5 * (x - y) * (x - y) - f_fn(x) - g_fn(y);
      if (margin < -1e-9 * std::max(1.0, std::abs(f_fn(x)) + std::abs(g_fn(y)))) {
        std::ostringstream msg;
        msg << "F(x) + G(y) > (x - y)^2 / 2 at witness (x, y) = (" << x << ", " << y
            << "), excess " << -margin;
        fail(ErrorKind::InadmissiblePair, msg.str());
      }
    }
  }

  const Measure1D mu_f = m.tilted(f_fn, kappa);
  const Measure1D mu_g = m.tilted(g_fn, kappa);
  const double log_if = *mu_f.log_tilt_integral();
  const double log_ig = *mu_g.log_tilt_integral();

  PhiReport phi = phi_correction(m, mu_f, mu_g);
  const double phi_zero_mode = -phi.alpha_nu * mu_f.barycenter() -
                               phi.alpha_mu * mu_g.barycenter() +
                               phi.alpha_mu * phi.alpha_nu +
                               (phi.alpha_mu + phi.alpha_nu) * m.barycenter();
  double phi_used = phi_zero_mode;
  std::vector<std::string> notes;
  if (is_standard_gaussian(m) && kappa == 1.0) {
    phi_used = std::min(phi_zero_mode, -mu_f.barycenter() * mu_g.barycenter());
    notes.push_back("Gaussian reference: using min{Phi(F,G), -bary(mu_F) bary(mu_G)}");
  }

  const double lhs = std::exp(log_if + log_ig);
  const double rhs = std::exp(kappa * phi_used);

  std::vector<FunctionalReport> reports;
  FunctionalReport fr;
  fr.name = "log_tilt_integral_F";
  fr.value = log_if;
  reports.push_back(fr);
  fr.name = "log_tilt_integral_G";
  fr.value = log_ig;
  reports.push_back(fr);
  fr.name = "phi_correction";
  fr.value = phi_used;
  reports.push_back(fr);

  const bool hyp = m.smooth_density();
  const std::string instance =
      "m=" + m.describe() + ", F=" + f_fn.to_string() + ", G=" + g_fn.to_string();
  return make_certificate("blaschke_santalo", instance, lhs, rhs, tol, 1e-9, hyp,
                          std::move(reports), std::move(notes));
}

SweepSummary summarize(const std::vector<Certificate>& certificates) {
  SweepSummary s;
  s.total = certificates.size();
  for (size_t i = 0; i < certificates.size(); ++i) {
    const Certificate& c = certificates[i];
    switch (c.verdict) {
      case Verdict::Holds: ++s.holds; break;
      case Verdict::Tight: ++s.tight; s.tight_indices.push_back(i); break;
      case Verdict::Violated: ++s.violated; break;
      case Verdict::HypothesesUnverified: ++s.hypotheses_unverified; break;
    }
    if (c.slack < s.min_slack) {
      s.min_slack = c.slack;
      s.min_slack_index = i;
    }
  }
  return s;
}

}  // namespace tal
