#pragma once

#include <stdexcept>
#include <string>

namespace homebot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (map, scenario config, model file, log record).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Precondition on an operation argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace homebot
