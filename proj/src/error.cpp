#include "scnp/error.hpp"

namespace scnp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInvalidParameter: return "invalid parameter";
    case ErrorCode::kEmptySet: return "empty set";
    case ErrorCode::kNoConvergence: return "no convergence";
    case ErrorCode::kNotSingleValued: return "not single-valued";
    case ErrorCode::kDiverged: return "diverged";
    case ErrorCode::kSchema: return "schema error";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace scnp
