#include "genreforge/error.hpp"

namespace genreforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::EmptyAudio: return "EmptyAudio";
    case ErrorCode::NonPowerOfTwoLength: return "NonPowerOfTwoLength";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::NegativeFrequency: return "NegativeFrequency";
    case ErrorCode::InvalidFrequencyRange: return "InvalidFrequencyRange";
    case ErrorCode::FrameTooShort: return "FrameTooShort";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NotFitted: return "NotFitted";
    case ErrorCode::InsufficientClassRows: return "InsufficientClassRows";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::SilentSignal: return "SilentSignal";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::UnknownModelKind: return "UnknownModelKind";
    case ErrorCode::UnknownHyperparameter: return "UnknownHyperparameter";
    case ErrorCode::UnfittedModel: return "UnfittedModel";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ModelFormat: return "ModelFormat";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ClassAbsent: return "ClassAbsent";
    case ErrorCode::NoAudioFound: return "NoAudioFound";
    case ErrorCode::OutputExists: return "OutputExists";
  }
  return "Unknown";
}

}  // namespace genreforge
