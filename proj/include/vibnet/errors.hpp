#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vibnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally invalid input (bad index, duplicate edge, zero weight, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed document. `where` is a field path or a line:column location.
class ParseError : public InputError {
 public:
  ParseError(std::string where, const std::string& what)
      : InputError(where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

// An operation was called outside its domain (e.g. a cyclic graph where a
// DAG is required). Carries a cycle witness when one is available.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what,
                             std::vector<int> cycle = {})
      : Error(what), cycle_(std::move(cycle)) {}

  const std::vector<int>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<int> cycle_;
};

// The residual graph has a directed cycle, so no placement exists.
class NotStabilizableError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DesignError : public Error {
 public:
  using Error::Error;
};

// Integration blow-up, solver non-convergence and similar failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Time step does not resolve the fastest vibration.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ThresholdNotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace vibnet
