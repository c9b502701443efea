#pragma once

#include <stdexcept>
#include <string>

namespace sentistream {

// One code per contract-level failure so callers and tests can match on
// kind instead of message text.
enum class ErrorCode {
  MalformedRow,
  BadHeader,
  ValenceOutOfRange,
  DuplicateToken,
  NegativeOffset,
  ScoreOutOfRange,
  SourceClosed,
  EmptyHorizon,
  TooFewPoints,
  DegenerateInput,
  DimensionMismatch,
  EmptyCluster,
  LengthMismatch,
  TooFewVectors,
  EmptySeries,
  IoError,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::ValenceOutOfRange: return "ValenceOutOfRange";
    case ErrorCode::DuplicateToken: return "DuplicateToken";
    case ErrorCode::NegativeOffset: return "NegativeOffset";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::SourceClosed: return "SourceClosed";
    case ErrorCode::EmptyHorizon: return "EmptyHorizon";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewVectors: return "TooFewVectors";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, long line = -1)
      : std::runtime_error(compose(code, message, line)), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }

  // 1-based input line number when the failure is tied to a file row, -1 otherwise.
  long line() const noexcept { return line_; }

 private:
  static std::string compose(ErrorCode code, const std::string& message, long line) {
    std::string out = to_string(code);
    out += ": ";
    out += message;
    if (line >= 0) {
      out += " (line ";
      out += std::to_string(line);
      out += ")";
    }
    return out;
  }

  ErrorCode code_;
  long line_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message, long line = -1) {
  throw Error(code, message, line);
}

}  // namespace sentistream
