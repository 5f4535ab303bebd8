#pragma once

#include <stdexcept>
#include <string>

namespace predq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration, detected before a run starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside a function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Offered load at or beyond capacity, either analytically or observed as
/// unbounded queue growth.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// The simulated-time cap was reached before the measured jobs completed.
class NonTerminationError : public Error {
 public:
  using Error::Error;
};

/// Malformed trace input. The message names the offending line.
class TraceError : public Error {
 public:
  TraceError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A scheduler logic bug: an event in the past, a missing prediction, or a
/// violated internal invariant.
class LogicError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace predq
