#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace classifieds {

enum class ErrorKind {
  InvalidArgument,
  EmptyInput,
  MissingColumn,
  UnexpectedColumn,
  EmptyCorpus,
  DimensionMismatch,
  ColumnMismatch,
  EmptyTrainingSet,
  NotLinear,
  NotFitted,
  LengthMismatch,
  EmptyVectors,
  TooFewRecords,
  IoError,
  FormatVersionMismatch,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::UnexpectedColumn: return "UnexpectedColumn";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ColumnMismatch: return "ColumnMismatch";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::NotLinear: return "NotLinear";
    case ErrorKind::NotFitted: return "NotFitted";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyVectors: return "EmptyVectors";
    case ErrorKind::TooFewRecords: return "TooFewRecords";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::FormatVersionMismatch: return "FormatVersionMismatch";
  }
  return "Unknown";
}

}  // namespace classifieds
