#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace genesem {

enum class ErrorCode {
  DuplicateGene,
  EmptyInput,
  MalformedRow,
  MissingGene,
  RaggedRow,
  NonFiniteValue,
  ShapeMismatch,
  CalibrationFailed,
  NonFiniteState,
  FitFailed,
  InvalidK,
  TooFewClusters,
  BadShape,
  PreconditionViolation,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateGene: return "DuplicateGene";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::MissingGene: return "MissingGene";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::TooFewClusters: return "TooFewClusters";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. `line` is 1-based (0 when not
/// applicable); `subject` carries the offending gene id, row index or stage.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::size_t line = 0, std::string subject = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(std::move(message)),
        line_(line),
        subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the error-code prefix.
  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::size_t line_;
  std::string subject_;
};

/// Same error with `context` prepended to the message.
inline Error with_context(const Error& e, std::string_view context) {
  return Error(e.code(), std::string(context) + ": " + e.message(), e.line(), e.subject());
}

inline void require(bool condition, std::string_view message) {
  if (!condition) throw Error(ErrorCode::PreconditionViolation, std::string(message));
}

}  // namespace genesem
