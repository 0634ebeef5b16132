#pragma once

#include <stdexcept>
#include <string>

namespace dob {

enum class ErrorCode {
  ZeroDenominator,
  PoleOnGrid,
  PoleOnCircle,
  InvalidParam,
  UnstableSensitivity,
  RootFinding,
  Config,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code tells callers (and the CLI
// exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dob
