#pragma once

#include <stdexcept>
#include <string>

namespace bayesmix {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method failed to reach its tolerance within its budget.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed prior-spec or tabulated-density document.
class SpecParseError : public std::invalid_argument {
 public:
  /// line 0 means the error concerns the whole document.
  SpecParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::invalid_argument(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bayesmix
