#pragma once

#include <stdexcept>
#include <string>

namespace macrobell {

/// Raised when a physical parameter is outside its allowed range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised on mode-registry problems: unknown, duplicate or mismatched labels.
class ModeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the Fock oracle when the truncation budget cannot represent a state.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace macrobell
