#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trainplan/error.hpp"

namespace trainplan {

// The closed variable set of the expression language. Keeping it fixed lets
// eval run against a flat slot array with no lookups or allocation.
enum class Var : int { X = 0, T = 1, A = 2, Tau = 3, Stage = 4 };

inline constexpr int kVarCount = 5;

const char* var_name(Var v);
std::optional<Var> var_from_name(std::string_view name);

// Variable bindings for eval. Unset slots trigger an unbound-variable error
// when referenced.
struct Bindings {
  std::array<double, kVarCount> values{};
  std::uint32_t mask = 0;

  Bindings& set(Var v, double value) {
    values[static_cast<int>(v)] = value;
    mask |= 1u << static_cast<int>(v);
    return *this;
  }
  bool has(Var v) const { return (mask >> static_cast<int>(v)) & 1u; }
  double get(Var v) const { return values[static_cast<int>(v)]; }
};

/// Parsed arithmetic expression over x, t, a, tau, stage.
///
/// Grammar (loosest to tightest): + -  |  * /  |  unary -  |  ^ (right
/// associative)  |  literals, variables, min/max/abs/exp/log/sqrt, parens.
/// Instances are immutable after parse; eval is reentrant and thread-safe.
class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view source);

  double eval(const Bindings& bindings) const;

  bool uses(Var v) const;

  // Canonical s-expression rendering, e.g. "(- t a)". Mostly for tests and
  // error reporting.
  std::string dump() const;

  // Original source text. Synthetic nodes added by scaled() are not
  // reflected here.
  const std::string& source() const { return source_; }

  // Returns a new expression computing (this) * factor. Used to turn an
  // instantaneous cost rate into a per-stage Riemann term.
  Expr scaled(double factor) const;

  bool empty() const { return nodes_.empty(); }

 private:
  enum class Op : std::uint8_t {
    Const, Variable, Neg, Add, Sub, Mul, Div, Pow, Min, Max, Abs, Exp, Log,
    Sqrt
  };

  struct Node {
    Op op;
    std::int32_t lhs = -1;
    std::int32_t rhs = -1;
    double value = 0.0;   // Op::Const
    Var var = Var::X;     // Op::Variable
    std::int32_t pos = -1;  // source offset; -1 for synthetic nodes
  };

  double eval_node(std::int32_t idx, const Bindings& b) const;
  void dump_node(std::int32_t idx, std::string& out) const;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  std::string source_;

  friend class ExprParser;
};

}  // namespace trainplan
