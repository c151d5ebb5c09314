#ifndef WSP_ERROR_HPP
#define WSP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsp {

enum class ErrorCode {
  ParseError,
  UnknownIdentifier,
  DuplicateIdentifier,
  ReservedIdentifier,
  CyclicOrder,
  UnauthorizedStep,
  StepLimitExceeded,
  MalformedConstraint,
  MissingHierarchy,
  NotAuthorized,
  UnsupportedConstraint,
  DegenerateThreshold,
  InvalidArgument,
  NotAPartition,
  NotARefinement,
  NotCanonical,
  MalformedTree,
  LevelOutOfRange,
  NonRegularConstraint,
  MixedRelations,
  OracleOnlyConstraints,
  Inapplicable,
  InsufficientUsers,
  BudgetExceeded,
  InternalInconsistency,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::DuplicateIdentifier: return "DuplicateIdentifier";
    case ErrorCode::ReservedIdentifier: return "ReservedIdentifier";
    case ErrorCode::CyclicOrder: return "CyclicOrder";
    case ErrorCode::UnauthorizedStep: return "UnauthorizedStep";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::MalformedConstraint: return "MalformedConstraint";
    case ErrorCode::MissingHierarchy: return "MissingHierarchy";
    case ErrorCode::NotAuthorized: return "NotAuthorized";
    case ErrorCode::UnsupportedConstraint: return "UnsupportedConstraint";
    case ErrorCode::DegenerateThreshold: return "DegenerateThreshold";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotAPartition: return "NotAPartition";
    case ErrorCode::NotARefinement: return "NotARefinement";
    case ErrorCode::NotCanonical: return "NotCanonical";
    case ErrorCode::MalformedTree: return "MalformedTree";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::NonRegularConstraint: return "NonRegularConstraint";
    case ErrorCode::MixedRelations: return "MixedRelations";
    case ErrorCode::OracleOnlyConstraints: return "OracleOnlyConstraints";
    case ErrorCode::Inapplicable: return "Inapplicable";
    case ErrorCode::InsufficientUsers: return "InsufficientUsers";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

// Capability errors: the input is well formed but outside what the chosen
// route can handle.
inline bool is_capability_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::StepLimitExceeded:
    case ErrorCode::UnsupportedConstraint:
    case ErrorCode::NonRegularConstraint:
    case ErrorCode::MixedRelations:
    case ErrorCode::OracleOnlyConstraints:
    case ErrorCode::Inapplicable:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::NotCanonical:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wsp

#endif
