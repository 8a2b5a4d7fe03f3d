#pragma once

#include <stdexcept>
#include <string>

namespace opinion {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or a violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Instance exceeds a size limit of an exhaustive routine (2^n state spaces).
class LimitError : public Error {
 public:
  using Error::Error;
};

/// A mathematical invariant failed to hold at runtime.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace opinion
