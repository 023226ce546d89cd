#pragma once

#include <stdexcept>
#include <string>

namespace fsqkd {

/// A physical or algorithmic parameter is outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The two parties' data or messages are inconsistent (length mismatch,
/// malformed message, empty key where one is required).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Authentication failure: pool exhausted or parties out of step.
class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fsqkd
