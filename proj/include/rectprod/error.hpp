#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rectprod {

enum class ErrorCode {
  DimensionMismatch,
  EndpointMismatch,
  MinViolation,
  NonPositiveGamma,
  DomainError,
  InvalidCoefficients,
  TypeError,
  UnknownPreset,
  UnknownFamily,
  BadParameter,
  NumericalBreakdown,
  ConvergenceFailure,
  EmptySample,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported as an Error carrying
// one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EndpointMismatch: return "EndpointMismatch";
    case ErrorCode::MinViolation: return "MinViolation";
    case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidCoefficients: return "InvalidCoefficients";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace rectprod
