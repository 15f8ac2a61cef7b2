#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gmaxent {

enum class ErrorCode {
  NumericalFailure,
  Overflow,
  NotPositive,
  NotHermitian,
  DimensionMismatch,
  ModelMismatch,
  InvalidModel,
  InvalidState,
  InvalidEffect,
  NoValues,
  DegenerateInput,
  NotAProjection,
  NotOrthogonal,
  InvalidTarget,
  ZeroFunctional,
  UnsupportedRepresentation,
  Unsupported,
  IncompatibleObjective,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gmaxent
