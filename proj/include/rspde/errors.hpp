#pragma once

#include <stdexcept>
#include <string>

namespace rspde {

/// Invalid parameters or inputs that violate an operation's preconditions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a result (non-contraction,
/// blow-up, singular factorization, negative circulant eigenvalue).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rspde
