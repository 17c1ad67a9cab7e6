#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tal/certificate.hpp"
#include "tal/expr.hpp"
#include "tal/functionals.hpp"
#include "tal/measure.hpp"

namespace tal {

/// Convexity-type constants declared by the instance; each verifier
/// spot-checks the ones it uses against sampled curvature of the measures.
struct DeclaredBounds {
  std::optional<double> kappa;        // reference measure, lower bound
  std::optional<double> kappa_prime;  // reference measure, upper bound
  std::optional<double> kappa0;       // first argument (upper or lower per variant)
  std::optional<double> kappa1;       // second argument, lower bound
  std::optional<double> kappa2;       // optional extra lower bound on V_0
  std::optional<double> tau;          // curvature bound on mu's potential
  std::optional<double> c_mu;         // Poincare constant of mu
  std::optional<double> c_mu0;        // Poincare constant of mu_0
};

/// Talagrand transport inequality: W2^2(mu, m)/2 <= Ent_m(mu) / kappa.
Certificate verify_talagrand(const Measure1D& m, const Measure1D& mu,
                             const DeclaredBounds& bounds, Tolerances tol = {});

enum class SymmetrizedVariant {
  STI1,  // symmetric reference and nu; (Ent + Ent) / kappa
  STI2,  // standard Gaussian reference, bary(nu) = 0
  SSTI,  // barycenter-corrected Gaussian form
  MC1,   // Poincare-improved constant, plain geodesic route
  MC2,   // two-sided reference bounds, generalized geodesic route
  RSTI,  // general reference with the Levy-point correction term
};

const char* symmetrized_variant_name(SymmetrizedVariant v);

Certificate verify_symmetrized(SymmetrizedVariant variant, const Measure1D& m,
                               const Measure1D& mu, const Measure1D& nu,
                               const DeclaredBounds& bounds, Tolerances tol = {});

enum class HwiLsiVariant { HWI, LSI, HWI_C13, LSI_C13, HWI_C21, LSI_C21 };

const char* hwi_lsi_variant_name(HwiLsiVariant v);

Certificate verify_hwi_lsi(HwiLsiVariant variant, const Measure1D& m, const Measure1D& mu,
                           const DeclaredBounds& bounds, Tolerances tol = {});

enum class PoincareVariant { Base, Refined };

/// Base: kappa int f^2 dm <= int (f')^2 dm for int f dm = 0.
/// Refined: constant kappa (1 + kappa/kappa') under the extra moment condition
/// int x f dm = 0; requests failing that condition route to Base with a note.
Certificate verify_poincare(PoincareVariant variant, const Measure1D& m, const Expr& f,
                            const DeclaredBounds& bounds, Tolerances tol = {});

enum class LemmaVariant {
  OddSymmetric,      // f odd, reference potential even
  GaussianCentered,  // m = gamma_1, int f dgamma = 0; equality iff f=ax, g=x/a+b
  General,           // general reference; right side built from f(xi), g(xi)
};

const char* lemma_variant_name(LemmaVariant v);

Certificate verify_lemma_core(LemmaVariant variant, const Measure1D& m, const Expr& f,
                              const Expr& g, const DeclaredBounds& bounds, Tolerances tol = {});

/// m(A) m(B) <= exp(-kappa d(A,B)^2 / 2 + kappa Phi(m, A, B)) for a reference
/// with mode at 0; the Gaussian case uses the min{Phi, -bary bary} form.
Certificate verify_concentration(const Measure1D& m, const IntervalSet& a,
                                 const IntervalSet& b, const DeclaredBounds& bounds,
                                 Tolerances tol = {});

/// int e^{kappa F} dm int e^{kappa G} dm <= e^{kappa Phi(m, F, G)} for pairs
/// with F(x) + G(y) <= (x - y)^2 / 2 (checked on a product grid).
Certificate verify_blaschke_santalo(const Measure1D& m, const Expr& f_fn, const Expr& g_fn,
                                    const DeclaredBounds& bounds, Tolerances tol = {});

struct SweepSummary {
  size_t total = 0;
  size_t holds = 0;
  size_t tight = 0;
  size_t violated = 0;
  size_t hypotheses_unverified = 0;
  double min_slack = kInf;
  size_t min_slack_index = 0;
  std::vector<size_t> tight_indices;
};

SweepSummary summarize(const std::vector<Certificate>& certificates);

/// Checks a declared bound kind against sampled curvature of -log density.
/// `lower` means the declaration asserts V'' >= value. Throws MissingBounds.
void check_declared_bound(const Measure1D& m, double value, bool lower,
                          const std::string& what);

/// Declared-or-intrinsic convexity bound lookup.
double require_kappa_lower(const Measure1D& m, const std::optional<double>& declared,
                           const std::string& what);
double require_kappa_upper(const Measure1D& m, const std::optional<double>& declared,
                           const std::string& what);

}  // namespace tal
