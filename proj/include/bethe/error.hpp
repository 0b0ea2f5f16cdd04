#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bethe {

enum class ErrorCode {
  NonSymmetric,
  NonPositiveVertexWeight,
  NotPermissive,
  DimensionMismatch,
  InvalidMeasure,
  ZeroNormalizer,
  OutOfRange,
  NotBiasedForm,
  ZeroMass,
  BoundaryPoint,
  OddDegree,
  DegreeTooLarge,
  OutOfBranchRange,
  InfiniteTheta,
  NotStationary,
  DegenerateVariance,
  WrongType,
  OddHalfEdges,
  AttemptsExhausted,
  ParityViolation,
  NotRegular,
  ZTooExpensive,
  TooLarge,
  NotAForest,
  LengthMismatch,
  NotRealizable,
  BadGrid,
  BadGraphFile,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NonPositiveVertexWeight: return "NonPositiveVertexWeight";
    case ErrorCode::NotPermissive: return "NotPermissive";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::ZeroNormalizer: return "ZeroNormalizer";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotBiasedForm: return "NotBiasedForm";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::BoundaryPoint: return "BoundaryPoint";
    case ErrorCode::OddDegree: return "OddDegree";
    case ErrorCode::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::OutOfBranchRange: return "OutOfBranchRange";
    case ErrorCode::InfiniteTheta: return "InfiniteTheta";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::WrongType: return "WrongType";
    case ErrorCode::OddHalfEdges: return "OddHalfEdges";
    case ErrorCode::AttemptsExhausted: return "AttemptsExhausted";
    case ErrorCode::ParityViolation: return "ParityViolation";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::ZTooExpensive: return "ZTooExpensive";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotAForest: return "NotAForest";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotRealizable: return "NotRealizable";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::BadGraphFile: return "BadGraphFile";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the failure kind, not the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace bethe
