#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bm {

enum class ErrorCode {
  OriginNotInterior,
  DimensionMismatch,
  NotVertexEnumerable,
  SingularMap,
  NotIdempotent,
  DimensionTooHigh,
  InvalidP,
  DegenerateCone,
  NotSymmetricBase,
  MalformedSpec,
  UnknownName,
  GeneratorCapacityExceeded,
  SymmetryFlagViolated,
  EmptyContactSet,
  NotOptimalPosition,
  HypothesisViolated,
  NoConditionHolds,
  UnknownSuite,
  InvalidBody,
  NotPlanar,
  Internal,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotVertexEnumerable: return "NotVertexEnumerable";
    case ErrorCode::SingularMap: return "SingularMap";
    case ErrorCode::NotIdempotent: return "NotIdempotent";
    case ErrorCode::DimensionTooHigh: return "DimensionTooHigh";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::DegenerateCone: return "DegenerateCone";
    case ErrorCode::NotSymmetricBase: return "NotSymmetricBase";
    case ErrorCode::MalformedSpec: return "MalformedSpec";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::GeneratorCapacityExceeded: return "GeneratorCapacityExceeded";
    case ErrorCode::SymmetryFlagViolated: return "SymmetryFlagViolated";
    case ErrorCode::EmptyContactSet: return "EmptyContactSet";
    case ErrorCode::NotOptimalPosition: return "NotOptimalPosition";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NoConditionHolds: return "NoConditionHolds";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
    case ErrorCode::InvalidBody: return "InvalidBody";
    case ErrorCode::NotPlanar: return "NotPlanar";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Errors caused by user input rather than by a defect in the library.
  bool is_validation() const noexcept {
    return code_ != ErrorCode::Internal && code_ != ErrorCode::NoConditionHolds;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace bm
