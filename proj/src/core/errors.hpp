#ifndef WEALTHLAB_CORE_ERRORS_HPP
#define WEALTHLAB_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wealthlab {

enum class ErrorCode {
  InvalidArgument,
  Domain,            // precondition violated (e.g. p <= 1/2 where an edge is required)
  SolverFailure,     // iteration cap hit before tolerance
  InsufficientData,  // not enough support for a fit / elite set too small
  Io,
  Config,
  Resource,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::SolverFailure: return "solver_failure";
    case ErrorCode::InsufficientData: return "insufficient_data";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
    case ErrorCode::Resource: return "resource";
  }
  return "unknown";
}

}  // namespace wealthlab

#endif
