#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace distillq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidQubitCount : public Error {
public:
  using Error::Error;
};

class InvalidProfile : public Error {
public:
  using Error::Error;
};

class InvalidConfig : public Error {
public:
  using Error::Error;
};

class EmptyCircuit : public Error {
public:
  EmptyCircuit() : Error("circuit has no gates") {}
};

/// Errors tied to a 1-based line of a gate-list document.
class LineError : public Error {
public:
  LineError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class UnknownGate : public LineError {
public:
  using LineError::LineError;
};

class MalformedLine : public LineError {
public:
  using LineError::LineError;
};

class InsufficientTrace : public Error {
public:
  InsufficientTrace()
      : Error("trace needs at least two occupancy entries") {}
};

class NonUniqueSteadyState : public Error {
public:
  using Error::Error;
};

class EmptyGrid : public Error {
public:
  EmptyGrid() : Error("calibration grid is empty") {}
};

} // namespace distillq
