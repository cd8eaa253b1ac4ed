#pragma once

#include <stdexcept>
#include <string>

namespace rsm {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  InsufficientData,
  RankDeficient,
  NotConvex,
  HardCase,
  SingularJacobian,
  StrictComplementarityViolated,
  StatusFlip,
  Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Data-file errors carry a 1-based location (row 1 is the header line).
class ParseError : public Error {
 public:
  enum class Kind { MissingHeader, RaggedRow, NonNumericCell };

  ParseError(Kind kind, int row, int column, const std::string& message)
      : Error(ErrorCode::Parse, message), kind_(kind), row_(row), column_(column) {}

  Kind kind() const noexcept { return kind_; }
  int row() const noexcept { return row_; }
  int column() const noexcept { return column_; }

 private:
  Kind kind_;
  int row_;
  int column_;
};

}  // namespace rsm
