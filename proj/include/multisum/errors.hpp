#pragma once

#include <stdexcept>
#include <string>

namespace multisum {

// Argument outside the mathematical domain of an operation (e.g. p outside
// the support of a psi function).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input: wrong dimension, empty grids, bad sizes.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs are well formed but an operation's precondition fails.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multisum
