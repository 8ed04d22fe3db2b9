#pragma once

#include <stdexcept>
#include <string>

namespace mbp {

// Bad arguments or malformed input data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid or inconsistent simulation configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant was broken (scheduler produced an infeasible
// service, a queue went negative, ...). Indicates a bug, not bad input.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbp
