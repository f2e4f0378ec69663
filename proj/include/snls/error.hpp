#pragma once

#include <stdexcept>
#include <string>

namespace snls {

// Rejected argument or configuration (precondition violation).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation not allowed in the current solver state (blown-up or halted path).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// File could not be read, written or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace snls
