#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mvd {

enum class ErrorCode {
  BadArgument,
  CorpusEmpty,
  UnknownId,
  BadDims,
  IdOutOfRange,
  ShapeMismatch,
  NonFinite,
  BadLabel,
  DimMismatch,
  ZeroCount,
  BadSchedule,
  EmptyDataset,
  LabelOutOfRange,
  LengthMismatch,
  EmptyInput,
  OneClassOnly,
  ParseError,
  UnknownLabel,
  EmptyFile,
  BadConfig,
  Io,
  BadFormat,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::CorpusEmpty: return "CorpusEmpty";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::BadDims: return "BadDims";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ZeroCount: return "ZeroCount";
    case ErrorCode::BadSchedule: return "BadSchedule";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::BadFormat: return "BadFormat";
  }
  return "Unknown";
}

// Every failure in the library surfaces as mvd::Error. Dataset errors carry
// the 1-based line number of the offending record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(format(code, what, line)), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  static std::string format(ErrorCode code, const std::string& what,
                            std::optional<std::size_t> line) {
    std::string msg = to_string(code);
    if (line) msg += "(line " + std::to_string(*line) + ")";
    if (!what.empty()) msg += ": " + what;
    return msg;
  }

  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace mvd
