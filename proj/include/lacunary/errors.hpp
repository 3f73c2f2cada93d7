#pragma once

#include <stdexcept>

namespace lacunary {

/// Input outside an operation's domain, or a violated precondition.
/// The CLI maps this to exit code 2.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not meet its accuracy contract.
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lacunary
