#pragma once

#include <stdexcept>
#include <string>

namespace scout {

enum class ErrorCode {
  DuplicateReportId,
  DuplicateDomainId,
  EmptyDomain,
  MalformedEmbedding,
  DimensionMismatch,
  UnknownDomain,
  NoScriptMatch,
  DuplicateEntry,
  ParseError,
  TransportFailure,
  SchemaViolation,
  NoRelevantDomain,
  SynthesisFailed,
  AssessmentFailed,
  NoTargets,
  BudgetExhausted,
  InvalidArgument,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateReportId: return "DuplicateReportId";
    case ErrorCode::DuplicateDomainId: return "DuplicateDomainId";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::MalformedEmbedding: return "MalformedEmbedding";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownDomain: return "UnknownDomain";
    case ErrorCode::NoScriptMatch: return "NoScriptMatch";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TransportFailure: return "TransportFailure";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::NoRelevantDomain: return "NoRelevantDomain";
    case ErrorCode::SynthesisFailed: return "SynthesisFailed";
    case ErrorCode::AssessmentFailed: return "AssessmentFailed";
    case ErrorCode::NoTargets: return "NoTargets";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace scout
