#pragma once

#include <stdexcept>
#include <string>

namespace flowlb {

enum class ErrorCode {
  ParseError,
  NotAssociative,
  IdentityViolation,
  BadGenerators,
  NotRegular,
  TooLarge,
  RMismatch,
  LatticeMismatch,
  SameState,
  NotLoopable,
  NotASubmonoid,
  BudgetExhausted,
  NotAdmissible,
  InvalidArgument,
  NotGroupMapping,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::NotAssociative: return "NOT_ASSOCIATIVE";
    case ErrorCode::IdentityViolation: return "IDENTITY_VIOLATION";
    case ErrorCode::BadGenerators: return "BAD_GENERATORS";
    case ErrorCode::NotRegular: return "NOT_REGULAR";
    case ErrorCode::TooLarge: return "TOO_LARGE";
    case ErrorCode::RMismatch: return "R_MISMATCH";
    case ErrorCode::LatticeMismatch: return "LATTICE_MISMATCH";
    case ErrorCode::SameState: return "SAME_STATE";
    case ErrorCode::NotLoopable: return "NOT_LOOPABLE";
    case ErrorCode::NotASubmonoid: return "NOT_A_SUBMONOID";
    case ErrorCode::BudgetExhausted: return "BUDGET_EXHAUSTED";
    case ErrorCode::NotAdmissible: return "NOT_ADMISSIBLE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::NotGroupMapping: return "NOT_GROUP_MAPPING";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace flowlb
