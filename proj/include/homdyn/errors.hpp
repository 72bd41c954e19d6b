#ifndef HOMDYN_ERRORS_HPP_
#define HOMDYN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace homdyn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input violates a documented precondition (wrong dimension, zero vector,
// broken bracket relation, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A factorization could not be computed reliably (singular or badly
// conditioned input).
class DecompositionError : public Error {
 public:
  using Error::Error;
};

// A geometric configuration (flag, embedding, step measure) that the
// requested operation does not handle.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

}  // namespace homdyn

#endif  // HOMDYN_ERRORS_HPP_
