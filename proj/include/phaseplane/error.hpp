#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phaseplane {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownFunctionError : public ParseError {
 public:
  UnknownFunctionError(const std::string& name, std::size_t offset)
      : ParseError("unknown function '" + name + "'", offset), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnboundIdentifierError : public Error {
 public:
  explicit UnboundIdentifierError(const std::string& name)
      : Error("unbound identifier " + name), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Real-arithmetic domain violation: division by zero, ln of a non-positive
/// number, sqrt of a negative number, and similar.
class DomainError : public Error {
 public:
  DomainError(const std::string& operation, double value)
      : Error("domain error in " + operation + " at value " + std::to_string(value)),
        operation_(operation),
        value_(value) {}
  const std::string& operation() const noexcept { return operation_; }
  double value() const noexcept { return value_; }

 private:
  std::string operation_;
  double value_;
};

/// A DomainError raised while evaluating a model, tagged with the state at
/// which it happened.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& where, const DomainError& cause)
      : Error(cause.what() + std::string(" (evaluating at ") + where + ")"), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class NotRationalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class DefectiveMatrixError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

/// A point handed to an equilibrium-only operation is not an equilibrium.
class NotEquilibriumError : public Error {
 public:
  using Error::Error;
};

/// A graphical-Jacobian probe segment crosses a null-cline; retry with smaller h.
class NullclineCrossingError : public Error {
 public:
  using Error::Error;
};

/// Parameter continuation lost the equilibrium. Carries the last parameter
/// value at which it was still found.
class ContinuationError : public Error {
 public:
  ContinuationError(const std::string& message, double last_good)
      : Error(message), last_good_(last_good) {}
  double last_good() const noexcept { return last_good_; }

 private:
  double last_good_;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// Model file syntax or semantic problem. `line()` is 1-based, 0 when the
/// problem is not tied to a single line (a missing section, for example).
class ModelFormatError : public ModelError {
 public:
  ModelFormatError(const std::string& message, int line)
      : ModelError(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace phaseplane
