#ifndef AMBIENT_ERROR_HPP
#define AMBIENT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ambient {

enum class ErrorCode {
  EmptyInput,
  EmptyProjection,
  InvalidSensor,
  ZeroSeparation,
  InvalidDepth,
  InvalidInput,
  ShapeMismatch,
  TooFewPoints,
  DegenerateNeighborhood,
  InsufficientFeatures,
  LengthMismatch,
  FormatError,
  IoError,
  InvalidScene,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every operation in the library. The code lets
/// callers branch on the failure kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ambient

#endif  // AMBIENT_ERROR_HPP
