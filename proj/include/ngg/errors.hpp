#pragma once

#include <stdexcept>
#include <string>

namespace ngg {

/// Base of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside the domain of the operation.
class InvalidParam : public Error {
 public:
  using Error::Error;
};

/// A generator could not produce a connected graph within its retry budget.
class ConnectivityFailure : public Error {
 public:
  using Error::Error;
};

/// A graph-wide statistic was requested on a disconnected graph.
class Disconnected : public Error {
 public:
  using Error::Error;
};

class EmptyTrace : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Configuration parsed but violates a constraint on a named field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, std::string reason)
      : Error(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

/// A transmitted word had no speaker in its group. Indicates a logic error.
class UnknownSource : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ngg
