#pragma once

#include <stdexcept>
#include <string>

namespace fracseg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or inputs violating a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (non positive definite covariance,
/// quadrature failure, degenerate data).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed, or its content could not be parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracseg
