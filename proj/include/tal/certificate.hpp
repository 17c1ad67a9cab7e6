#pragma once

#include <string>
#include <vector>

#include "tal/functionals.hpp"

namespace tal {

enum class Verdict { Holds, Tight, Violated, HypothesesUnverified };

const char* verdict_name(Verdict v);

struct Tolerances {
  double atol = 1e-7;
  double rtol = 1e-7;
};

/// One verified inequality instance: lhs <= rhs with slack = rhs - lhs.
struct Certificate {
  std::string inequality_id;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double atol = 1e-7;
  double rtol = 1e-7;
  Verdict verdict = Verdict::Holds;
  double error_estimate = 0.0;
  bool hypotheses_verified = true;
  std::vector<FunctionalReport> functionals;
  std::vector<std::string> notes;
};

/// Builds the certificate and assigns the verdict:
///   Tight    iff |slack| <= max(atol, rtol * max(|lhs|, |rhs|)),
///   Violated iff slack < -that tolerance,
///   otherwise Holds; a non-Violated verdict downgrades to
///   HypothesesUnverified when hypotheses could not be checked.
Certificate make_certificate(std::string id, std::string instance, double lhs, double rhs,
                             Tolerances tol, double error_estimate, bool hypotheses_verified,
                             std::vector<FunctionalReport> functionals = {},
                             std::vector<std::string> notes = {});

}  // namespace tal
