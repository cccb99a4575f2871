#pragma once

#include <stdexcept>
#include <string>

namespace sparkspread {

// Invalid user-supplied input (parameters, contracts, config files).
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A series or iteration hit its hard cap before meeting its tolerance.
// The CLI maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace sparkspread
