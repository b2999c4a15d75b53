#pragma once

#include <stdexcept>
#include <string>

namespace relaytree {

enum class ErrorCode {
  InvalidArgument,  // malformed or out-of-range input
  NotInTriangle,    // operation needs alpha + beta < 1
  IndexOverflow,    // band index exceeded its cap
  NoEntry,          // trajectory never reached the target region
  NoConvergence,    // sensor-count search exceeded its level cap
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotInTriangle: return "NotInTriangle";
    case ErrorCode::IndexOverflow: return "IndexOverflow";
    case ErrorCode::NoEntry: return "NoEntry";
    case ErrorCode::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace relaytree
