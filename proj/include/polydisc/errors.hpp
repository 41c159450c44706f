#pragma once

#include <stdexcept>
#include <string>

namespace polydisc {

/// Argument outside the mathematical domain of an operation (|z| > 1, r >= 1, n = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integer arithmetic that would overflow, or a prime beyond the cached sieve.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Series whose spectrum is not in the class an operation requires.
class SpectrumError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration, parameters or input documents.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iteration or size cap was hit before the computation finished.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polydisc
