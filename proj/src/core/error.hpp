#pragma once

#include <stdexcept>
#include <string>

namespace radar {

// Error categories surface unchanged through the C API as status codes.
enum class ErrorKind {
  InvalidArgument,
  Parse,
  Range,
  Validation,
  Scenario,
  Transport,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorKind::Range, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class ScenarioError : public Error {
 public:
  explicit ScenarioError(const std::string& what) : Error(ErrorKind::Scenario, what) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error(ErrorKind::Transport, what) {}
};

// Thrown by send() when the configured rate cap would be exceeded; the caller
// waits until Transport::next_send_time() and retries.
class Backpressure : public TransportError {
 public:
  explicit Backpressure(double retry_at)
      : TransportError("send rate cap reached"), retry_at_(retry_at) {}
  double retry_at() const noexcept { return retry_at_; }

 private:
  double retry_at_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace radar
