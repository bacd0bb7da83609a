#pragma once

#include <stdexcept>
#include <string>

namespace explore {

// Malformed or inconsistent run configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arguments violating an operation's preconditions (shapes, sizes, non-finite inputs).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite values produced during training.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace explore
