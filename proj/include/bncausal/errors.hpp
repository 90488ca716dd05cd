#ifndef BNCAUSAL_ERRORS_HPP_
#define BNCAUSAL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace bncausal {

// Machine-checkable failure categories. CLI maps these to exit code 2;
// the simulation harness records them per run instead of aborting.
enum class ErrorCode {
  MissingColumn,
  NonBinaryRole,
  EmptyFile,
  RaggedRow,
  MissingValue,
  ArityMismatch,
  UnobservedParentConfig,
  ZeroEvidenceProbability,
  UndefinedCptRow,
  EmptyArm,
  InvalidArgument,
  ParseError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace bncausal

#endif  // BNCAUSAL_ERRORS_HPP_
