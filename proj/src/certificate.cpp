#include "tal/certificate.hpp"

#include <cmath>

namespace tal {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Tight: return "Tight";
    case Verdict::Violated: return "Violated";
    case Verdict::HypothesesUnverified: return "HypothesesUnverified";
  }
  return "Holds";
}

Certificate make_certificate(std::string id, std::string instance, double lhs, double rhs,
                             Tolerances tol, double error_estimate, bool hypotheses_verified,
                             std::vector<FunctionalReport> functionals,
                             std::vector<std::string> notes) {
  Certificate cert;
  cert.inequality_id = std::move(id);
  cert.instance = std::move(instance);
  cert.lhs = lhs;
  cert.rhs = rhs;
  cert.slack = rhs - lhs;
  cert.atol = tol.atol;
  cert.rtol = tol.rtol;
  cert.error_estimate = error_estimate;
  cert.hypotheses_verified = hypotheses_verified;
  cert.functionals = std::move(functionals);
  cert.notes = std::move(notes);

  const double threshold = std::max(tol.atol, tol.rtol * std::max(std::abs(lhs), std::abs(rhs)));
  if (std::abs(cert.slack) <= threshold) {
    cert.verdict = Verdict::Tight;
  } else if (cert.slack < -threshold) {
    cert.verdict = Verdict::Violated;
  } else {
    cert.verdict = Verdict::Holds;
  }
  if (!hypotheses_verified && cert.verdict != Verdict::Violated) {
    cert.verdict = Verdict::HypothesesUnverified;
  }
  return cert;
}

}  // namespace tal
