#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoptr {

enum class ErrorCode {
  DegenerateTriangle,
  TooFewPoints,
  AllCollinear,
  DuplicatePoints,
  TooManyPoints,
  InvalidTour,
  ZeroSignedArea,
  MalformedSequence,
  InfeasibleConfig,
  CorruptFile,
  VersionMismatch,
  InvariantViolation,
  ShapeMismatch,
  AllMasked,
  IndexOutOfRange,
  LabelMasked,
  SampleMismatch,
  ConfigInvalid,
  CheckpointMismatch,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace geoptr
