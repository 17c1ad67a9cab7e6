#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tal {

/// Error categories surfaced by the library. Every throwing path tags its
/// exception with one of these so callers (and the CLI) can react uniformly.
enum class ErrorKind {
  NonIntegrable,
  InvalidPotential,
  DomainError,
  AmbiguousMode,
  EmptyRestriction,
  DegenerateTarget,
  MissingBounds,
  HypothesisError,
  NotMonotone,
  InadmissiblePair,
  NotSpd,
  DimensionError,
  NumericMonotonicityBreak,
  DegenerateCurve,
  SizeLimit,
  UnknownInequality,
  ConfigError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Closed interval, endpoints may be +-inf.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

inline bool nearly_equal(double a, double b, double atol, double rtol) {
  return std::abs(a - b) <= std::max(atol, rtol * std::max(std::abs(a), std::abs(b)));
}

}  // namespace tal
