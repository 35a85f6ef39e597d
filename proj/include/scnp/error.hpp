#pragma once

#include <stdexcept>
#include <string>

namespace scnp {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidParameter,
  kEmptySet,
  kNoConvergence,
  kNotSingleValued,
  kDiverged,
  kSchema,
  kIo,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; the code tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scnp
