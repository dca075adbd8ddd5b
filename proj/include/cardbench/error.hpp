#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cardbench {

enum class ErrorCode {
  kIo,
  kSchema,
  kMissingTableFile,
  kColumnTypeMismatch,
  kDuplicateTableName,
  kUnknownTable,
  kUnknownColumn,
  kUnknownJoinEdge,
  kSyntaxError,
  kDisconnectedJoinGraph,
  kCyclicJoinGraph,
  kNonEquiJoin,
  kResourceLimit,
  kUnsupportedMethod,
  kInsufficientData,
  kUnmodeledColumn,
  kIncompleteCardinalityMap,
  kEmptyInput,
  kDegenerateVariance,
  kGenerationExhausted,
  kInvalidArgument,
  kInvariantViolation,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception; the code drives CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // Message without the code-name prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace cardbench
