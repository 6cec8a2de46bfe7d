#pragma once

#include <stdexcept>
#include <string>

namespace selinf {

// Caller passed arguments that violate an operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A problem is too large to be handled in memory; decompose it first.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The LP solver failed to reach a verdict (iteration cap, lost precision).
// Distinct from an infeasible verdict.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A test cannot be evaluated on the given system (e.g. missing numeric
// payloads, zero variance). Callers translate this into an inapplicable
// verdict rather than a failure.
class Inapplicable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input document. `where` names the offending field path.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace selinf
