#pragma once

#include <stdexcept>
#include <string>

namespace fdea {

/// Input data or configuration violates a documented invariant.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (e.g. alpha not in [0,1]).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A dataset or config file could not be read. The message carries the location.
class ParseError : public ValidationError {
public:
  ParseError(const std::string& where, const std::string& what)
      : ValidationError(where + ": " + what), location_(where) {}

  const std::string& location() const noexcept { return location_; }

private:
  std::string location_;
};

/// The LP engine could not certify a result (iteration guard, numerical breakdown).
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdea
