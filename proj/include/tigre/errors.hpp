#pragma once

#include <stdexcept>
#include <string>

namespace tigre {

// Invalid argument or violated precondition (bad angle, mismatched sizes,
// off-grid emitter, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical failure inside the estimator (non-finite update, singular system).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario or measurement file.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string what, int line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace tigre
