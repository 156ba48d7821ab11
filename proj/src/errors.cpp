#include "carpetdim/errors.hpp"

namespace carpetdim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::OrderViolation: return "OrderViolation";
    case ErrorKind::TranslationOutOfBox: return "TranslationOutOfBox";
    case ErrorKind::RectangleOverlap: return "RectangleOverlap";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::FieldMismatch: return "FieldMismatch";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::PrecisionUnreachable: return "PrecisionUnreachable";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ZeroBins: return "ZeroBins";
    case ErrorKind::NonpositiveQ: return "NonpositiveQ";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::InsufficientTail: return "InsufficientTail";
    case ErrorKind::InsufficientScales: return "InsufficientScales";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::ConflictingEvidence: return "ConflictingEvidence";
    case ErrorKind::MissingS: return "MissingS";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace carpetdim
