#pragma once

#include <stdexcept>
#include <string>

namespace gibbsdyn {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation (t <= 0, n < 2, NaN input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A tolerance or configuration record is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NotDifferentiableError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Arguments of a difference quotient are not strictly increasing.
class OrderingError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ShapeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotApplicableError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical procedure could not reach a decision; the message carries diagnostics.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Quadrature could not certify the requested accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

class InsufficientStatisticsError : public Error {
 public:
  using Error::Error;
};

class RngError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document (potential description, report).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gibbsdyn
