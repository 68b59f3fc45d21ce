#pragma once

#include <stdexcept>
#include <string>

namespace vulca {

// Every failure the library can raise, one code per contract violation.
// The CLI maps codes onto its exit categories (see exit_code_for).
enum class ErrorCode {
  // schema / config / input contract
  DuplicateLabel,
  WrongDimensionCount,
  UnknownLabel,
  OutOfRange,
  OutOfRangeScore,
  MissingLabel,
  MissingScore,
  DimMismatch,
  SchemaError,
  SchemaInvalid,
  MissingKey,
  DuplicateId,
  NoStructuredObject,
  MalformedObject,
  EmptyCommentary,
  InvalidK,
  TooFewPoints,
  InvalidConfig,
  IoError,
  NonFiniteDistance,
  // inference availability
  EndpointUnavailable,
  MalformedResponse,
  CacheMiss,
  // degenerate statistics
  EmptyGroup,
  EmptyCollection,
  EmptyDistribution,
  EmptyProfile,
  ZeroVector,
  DegenerateVariance,
  DegenerateChance,
  DegenerateBetweenTarget,
  DegenerateBandwidth,
  TooFewSamples,
  NumericalOverflow,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::WrongDimensionCount: return "WrongDimensionCount";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::OutOfRangeScore: return "OutOfRangeScore";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::SchemaInvalid: return "SchemaInvalid";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NoStructuredObject: return "NoStructuredObject";
    case ErrorCode::MalformedObject: return "MalformedObject";
    case ErrorCode::EmptyCommentary: return "EmptyCommentary";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NonFiniteDistance: return "NonFiniteDistance";
    case ErrorCode::EndpointUnavailable: return "EndpointUnavailable";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::CacheMiss: return "CacheMiss";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::EmptyCollection: return "EmptyCollection";
    case ErrorCode::EmptyDistribution: return "EmptyDistribution";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::DegenerateChance: return "DegenerateChance";
    case ErrorCode::DegenerateBetweenTarget: return "DegenerateBetweenTarget";
    case ErrorCode::DegenerateBandwidth: return "DegenerateBandwidth";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NumericalOverflow: return "NumericalOverflow";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// CLI exit categories: 0 success, 2 schema/config, 3 inference unavailable,
// 4 degenerate statistics.
inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::EndpointUnavailable:
    case ErrorCode::MalformedResponse:
    case ErrorCode::CacheMiss:
      return 3;
    case ErrorCode::EmptyGroup:
    case ErrorCode::EmptyCollection:
    case ErrorCode::EmptyDistribution:
    case ErrorCode::EmptyProfile:
    case ErrorCode::ZeroVector:
    case ErrorCode::DegenerateVariance:
    case ErrorCode::DegenerateChance:
    case ErrorCode::DegenerateBetweenTarget:
    case ErrorCode::DegenerateBandwidth:
    case ErrorCode::TooFewSamples:
    case ErrorCode::NumericalOverflow:
      return 4;
    default:
      return 2;
  }
}

}  // namespace vulca
