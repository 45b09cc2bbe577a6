#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trainplan {

// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by Expr::parse. `position` is a 0-based character offset into the
// source string; end-of-input errors point one past the last character.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier };

  ParseError(Kind kind, std::size_t position, const std::string& msg)
      : Error(msg), kind(kind), position(position) {}

  Kind kind;
  std::size_t position;
};

// Raised by Expr::eval: unbound variable or a numeric domain error
// (division by zero, log of a non-positive value, sqrt of a negative).
class EvalError : public Error {
 public:
  enum class Kind { UnboundVariable, Domain };

  EvalError(Kind kind, std::size_t position, const std::string& msg)
      : Error(msg), kind(kind), position(position) {}

  Kind kind;
  std::size_t position;
};

// Invariant violation on a parameter set or problem definition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Config file problems: JSON syntax, unknown keys, wrong types.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The state grid is too small for the problem: some state the value at x0
// depends on falls outside [lo, hi]. `required_lo/hi` is the minimal
// enclosing interval; widening the grid to cover it makes the solve clean.
class GridExitError : public Error {
 public:
  GridExitError(double required_lo, double required_hi, int stage,
                const std::string& msg)
      : Error(msg), required_lo(required_lo), required_hi(required_hi),
        stage(stage) {}

  double required_lo;
  double required_hi;
  int stage;  // 1-based stage where the exit was first seen; 0 if n/a
};

// Oracle expansion budget exhausted.
class BudgetError : public Error {
 public:
  BudgetError(long long nodes_reached, const std::string& msg)
      : Error(msg), nodes_reached(nodes_reached) {}

  long long nodes_reached;
};

// Generic solver failure (e.g. a refinement level that cannot be made to fit
// the grid even after widening).
class SolveError : public Error {
 public:
  using Error::Error;
};

}  // namespace trainplan
