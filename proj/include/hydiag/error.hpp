#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hydiag {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ")"
                   : what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Ids out of range, duplicate names, unknown references.
class ModelError : public Error {
 public:
  using Error::Error;
};

// A fault axiom violated at the syntactic (timed automaton) level.
class AxiomError : public Error {
 public:
  AxiomError(std::string rule, const std::string& what)
      : Error(rule + ": " + what), rule_(std::move(rule)) {}

  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string rule_;
};

// Observation cells that do not partition the external valuation space.
class PartitionError : public Error {
 public:
  PartitionError(std::string witness, const std::string& what)
      : Error(what + " at " + witness), witness_(std::move(witness)) {}

  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

// A configured resource cap (classes, estimator states, enumeration) was hit.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::size_t count)
      : Error(what + ": exceeded cap of " + std::to_string(count)), count_(count) {}

  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

// Observed behavior with no matching diagnoser transition.
class NoConsistentExecution : public Error {
 public:
  NoConsistentExecution(const std::string& what, std::size_t index)
      : Error(what + " at event " + std::to_string(index)), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace hydiag
