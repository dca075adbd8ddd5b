#include "cardbench/error.hpp"

namespace cardbench {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kMissingTableFile: return "MissingTableFile";
    case ErrorCode::kColumnTypeMismatch: return "ColumnTypeMismatch";
    case ErrorCode::kDuplicateTableName: return "DuplicateTableName";
    case ErrorCode::kUnknownTable: return "UnknownTable";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kUnknownJoinEdge: return "UnknownJoinEdge";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kDisconnectedJoinGraph: return "DisconnectedJoinGraph";
    case ErrorCode::kCyclicJoinGraph: return "CyclicJoinGraph";
    case ErrorCode::kNonEquiJoin: return "NonEquiJoin";
    case ErrorCode::kResourceLimit: return "ResourceLimit";
    case ErrorCode::kUnsupportedMethod: return "UnsupportedMethod";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kUnmodeledColumn: return "UnmodeledColumn";
    case ErrorCode::kIncompleteCardinalityMap: return "IncompleteCardinalityMap";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kGenerationExhausted: return "GenerationExhausted";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), message_(message) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace cardbench
