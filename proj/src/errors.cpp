#include "bncausal/errors.hpp"

namespace bncausal {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonBinaryRole: return "NonBinaryRole";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::UnobservedParentConfig: return "UnobservedParentConfig";
    case ErrorCode::ZeroEvidenceProbability: return "ZeroEvidenceProbability";
    case ErrorCode::UndefinedCptRow: return "UndefinedCptRow";
    case ErrorCode::EmptyArm: return "EmptyArm";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

}  // namespace bncausal
