#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace genreforge {

/// Failure categories shared by every module. The CLI prints the category
/// name as the first token of its single-line error report.
enum class ErrorCode {
  InvalidArgument,
  MalformedContainer,
  UnsupportedEncoding,
  EmptyAudio,
  NonPowerOfTwoLength,
  SignalTooShort,
  KindMismatch,
  NegativeFrequency,
  InvalidFrequencyRange,
  FrameTooShort,
  LengthMismatch,
  IoFailure,
  SchemaMismatch,
  BadValue,
  UnknownLabel,
  NotFitted,
  InsufficientClassRows,
  TooShort,
  SilentSignal,
  SingleClassInput,
  UnknownModelKind,
  UnknownHyperparameter,
  UnfittedModel,
  DimensionMismatch,
  ModelFormat,
  Empty,
  TooFewRows,
  ClassAbsent,
  NoAudioFound,
  OutputExists,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace genreforge
