#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uwb1a {

// Thrown when a three-range triple admits no real speed solution
// (negative discriminant, typically a noise-inconsistent triple).
class NoSolutionError : public std::runtime_error {
 public:
  NoSolutionError(const std::string& what, double discriminant)
      : std::runtime_error(what), discriminant_(discriminant) {}
  double discriminant() const { return discriminant_; }

 private:
  double discriminant_;
};

// Thrown when the conditioning denominator r2^2 + r0^2 - 2 r1^2 is
// non-positive and the first-order variance is undefined.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double denom)
      : std::runtime_error(what), denom_(denom) {}
  double denom() const { return denom_; }

 private:
  double denom_;
};

// Thrown by the Monte-Carlo speed oracle when every trial failed.
class OracleDegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structured parse failure; line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace uwb1a
