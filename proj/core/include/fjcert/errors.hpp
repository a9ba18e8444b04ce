#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fjcert {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (expression text, problem files, rational literals).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Syntax error inside an expression, positioned by byte offset.
class ExprSyntaxError : public InputError {
 public:
  ExprSyntaxError(std::size_t offset, const std::string& what)
      : InputError("syntax error at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// An identifier that is not among the declared variables.
class UndeclaredVariableError : public InputError {
 public:
  UndeclaredVariableError(std::size_t offset, std::string name)
      : InputError("undeclared variable '" + name + "' at offset " + std::to_string(offset)),
        offset_(offset),
        name_(std::move(name)) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t offset_;
  std::string name_;
};

/// Problem-file error positioned by 1-based line and column.
class ProblemParseError : public InputError {
 public:
  ProblemParseError(std::size_t line, std::size_t column, const std::string& what)
      : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                   what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Evaluation left the domain of an expression (log/sqrt of a bad argument,
/// division by zero, overflow). `subtree()` prints the offending node.
class DomainError : public Error {
 public:
  DomainError(std::string subtree, const std::string& what)
      : Error("domain error in '" + subtree + "': " + what), subtree_(std::move(subtree)) {}
  const std::string& subtree() const noexcept { return subtree_; }

 private:
  std::string subtree_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t size, std::size_t rank)
      : Error("singular " + std::to_string(size) + "x" + std::to_string(size) +
              " matrix (rank " + std::to_string(rank) + ")"),
        rank_(rank) {}
  std::size_t rank() const noexcept { return rank_; }

 private:
  std::size_t rank_;
};

/// A precondition of an engine operation was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Internal inconsistency (cross-check mismatch, certificate that fails its
/// own exact invariants). Always a bug, never user error.
class EngineFault : public Error {
 public:
  using Error::Error;
};

}  // namespace fjcert
