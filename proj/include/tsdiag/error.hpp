#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsdiag {

enum class ErrorCode {
  LineCountMismatch,
  IoError,
  EncodingError,
  MissingColumn,
  EmptySplit,
  EmptyInput,
  OutOfRangeValue,
  BinMismatch,
  UnknownSplit,
  EmptyDataset,
  SizeMismatch,
  NoReferences,
  LengthMismatch,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Input or validation failure. The CLI maps these to exit code 1; anything
// else escaping a command is treated as an internal error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tsdiag
