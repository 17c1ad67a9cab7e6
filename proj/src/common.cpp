#include "tal/common.hpp"

namespace tal {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonIntegrable: return "NonIntegrable";
    case ErrorKind::InvalidPotential: return "InvalidPotential";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::AmbiguousMode: return "AmbiguousMode";
    case ErrorKind::EmptyRestriction: return "EmptyRestriction";
    case ErrorKind::DegenerateTarget: return "DegenerateTarget";
    case ErrorKind::MissingBounds: return "MissingBounds";
    case ErrorKind::HypothesisError: return "HypothesisError";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::InadmissiblePair: return "InadmissiblePair";
    case ErrorKind::NotSpd: return "NotSpd";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::NumericMonotonicityBreak: return "NumericMonotonicityBreak";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::UnknownInequality: return "UnknownInequality";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Error";
}

}  // namespace tal
