#include "trainplan/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace trainplan {

namespace {

const char* const kVarNames[kVarCount] = {"x", "t", "a", "tau", "stage"};

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

const char* var_name(Var v) { return kVarNames[static_cast<int>(v)]; }

std::optional<Var> var_from_name(std::string_view name) {
  for (int i = 0; i < kVarCount; ++i) {
    if (name == kVarNames[i]) return static_cast<Var>(i);
  }
  return std::nullopt;
}

// Recursive-descent parser. Kept as a separate class so the Expr header
// stays free of parsing state.
class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e;
    e.source_.assign(src_.data(), src_.size());
    nodes_ = &e.nodes_;
    skip_ws();
    if (at_end()) throw syntax("empty expression");
    e.root_ = parse_sum();
    skip_ws();
    if (!at_end()) throw syntax("unexpected trailing input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Expr::Node>* nodes_ = nullptr;

  using Op = Expr::Op;

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  ParseError syntax(const std::string& what) const {
    std::string msg = what + " at position " + std::to_string(pos_);
    if (at_end()) msg += " (end of input)";
    return ParseError(ParseError::Kind::Syntax, pos_, msg);
  }

  std::int32_t add(Expr::Node n) {
    nodes_->push_back(n);
    return static_cast<std::int32_t>(nodes_->size() - 1);
  }

  std::int32_t binary(Op op, std::int32_t lhs, std::int32_t rhs,
                      std::size_t at) {
    Expr::Node n;
    n.op = op;
    n.lhs = lhs;
    n.rhs = rhs;
    n.pos = static_cast<std::int32_t>(at);
    return add(n);
  }

  // sum := product (('+'|'-') product)*
  std::int32_t parse_sum() {
    std::int32_t lhs = parse_product();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      std::size_t at = pos_;
      ++pos_;
      std::int32_t rhs = parse_product();
      lhs = binary(c == '+' ? Op::Add : Op::Sub, lhs, rhs, at);
    }
  }

  // product := unary (('*'|'/') unary)*
  std::int32_t parse_product() {
    std::int32_t lhs = parse_unary();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      std::size_t at = pos_;
      ++pos_;
      std::int32_t rhs = parse_unary();
      lhs = binary(c == '*' ? Op::Mul : Op::Div, lhs, rhs, at);
    }
  }

  // unary := '-' unary | power
  std::int32_t parse_unary() {
    skip_ws();
    if (peek() == '-') {
      std::size_t at = pos_;
      ++pos_;
      std::int32_t operand = parse_unary();
      Expr::Node n;
      n.op = Op::Neg;
      n.lhs = operand;
      n.pos = static_cast<std::int32_t>(at);
      return add(n);
    }
    return parse_power();
  }

  // power := primary ('^' unary)?   -- right associative, and the exponent
  // may carry its own unary minus ("2^-3").
  std::int32_t parse_power() {
    std::int32_t base = parse_primary();
    skip_ws();
    if (peek() != '^') return base;
    std::size_t at = pos_;
    ++pos_;
    std::int32_t exponent = parse_unary();
    return binary(Op::Pow, base, exponent, at);
  }

  std::int32_t parse_primary() {
    skip_ws();
    if (at_end()) throw syntax("expected operand");
    char c = peek();
    if (c == '(') {
      ++pos_;
      std::int32_t inner = parse_sum();
      skip_ws();
      if (peek() != ')') throw syntax("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    throw syntax(std::string("unexpected character '") + c + "'");
  }

  std::int32_t parse_number() {
    std::size_t at = pos_;
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    // Token is bounded by the view; strtod stops at the first non-numeric
    // character so reading past our window is not a concern for valid input.
    std::string tail(src_.substr(pos_));
    double v = std::strtod(tail.c_str(), &end);
    if (end == tail.c_str()) throw syntax("malformed number");
    pos_ += static_cast<std::size_t>(end - tail.c_str());
    (void)begin;
    Expr::Node n;
    n.op = Op::Const;
    n.value = v;
    n.pos = static_cast<std::int32_t>(at);
    return add(n);
  }

  std::int32_t parse_identifier() {
    std::size_t at = pos_;
    while (!at_end() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      ++pos_;
    std::string_view name = src_.substr(at, pos_ - at);
    skip_ws();
    if (peek() == '(') return parse_call(name, at);

    std::optional<Var> v = var_from_name(name);
    if (!v) {
      throw ParseError(ParseError::Kind::UnknownIdentifier, at,
                       "unknown identifier '" + std::string(name) +
                           "' at position " + std::to_string(at));
    }
    Expr::Node n;
    n.op = Op::Variable;
    n.var = *v;
    n.pos = static_cast<std::int32_t>(at);
    return add(n);
  }

  std::int32_t parse_call(std::string_view name, std::size_t at) {
    Op op;
    int arity;
    if (name == "min") { op = Op::Min; arity = 2; }
    else if (name == "max") { op = Op::Max; arity = 2; }
    else if (name == "abs") { op = Op::Abs; arity = 1; }
    else if (name == "exp") { op = Op::Exp; arity = 1; }
    else if (name == "log") { op = Op::Log; arity = 1; }
    else if (name == "sqrt") { op = Op::Sqrt; arity = 1; }
    else {
      throw ParseError(ParseError::Kind::UnknownIdentifier, at,
                       "unknown function '" + std::string(name) +
                           "' at position " + std::to_string(at));
    }
    ++pos_;  // '('
    std::int32_t first = parse_sum();
    std::int32_t second = -1;
    skip_ws();
    if (arity == 2) {
      if (peek() != ',')
        throw syntax(std::string(name) + " expects 2 arguments; expected ','");
      ++pos_;
      second = parse_sum();
      skip_ws();
    } else if (peek() == ',') {
      throw syntax(std::string(name) + " expects 1 argument");
    }
    if (peek() != ')') throw syntax("expected ')'");
    ++pos_;
    Expr::Node n;
    n.op = op;
    n.lhs = first;
    n.rhs = second;
    n.pos = static_cast<std::int32_t>(at);
    return add(n);
  }
};

Expr Expr::parse(std::string_view source) { return ExprParser(source).run(); }

namespace {

[[noreturn]] void domain_error(const char* what, std::int32_t pos,
                               const std::string& source) {
  std::string msg(what);
  if (pos >= 0) {
    msg += " at position " + std::to_string(pos);
    if (!source.empty()) msg += " in '" + source + "'";
  }
  throw EvalError(EvalError::Kind::Domain, pos < 0 ? 0 : pos, msg);
}

}  // namespace

double Expr::eval_node(std::int32_t idx, const Bindings& b) const {
  const Node& n = nodes_[idx];
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Variable:
      if (!b.has(n.var)) {
        throw EvalError(EvalError::Kind::UnboundVariable,
                        n.pos < 0 ? 0 : n.pos,
                        std::string("unbound variable '") + var_name(n.var) +
                            "'");
      }
      return b.get(n.var);
    case Op::Neg:
      return -eval_node(n.lhs, b);
    case Op::Add:
      return eval_node(n.lhs, b) + eval_node(n.rhs, b);
    case Op::Sub:
      return eval_node(n.lhs, b) - eval_node(n.rhs, b);
    case Op::Mul:
      return eval_node(n.lhs, b) * eval_node(n.rhs, b);
    case Op::Div: {
      double num = eval_node(n.lhs, b);
      double den = eval_node(n.rhs, b);
      if (den == 0.0) domain_error("division by zero", n.pos, source_);
      return num / den;
    }
    case Op::Pow: {
      double base = eval_node(n.lhs, b);
      double exponent = eval_node(n.rhs, b);
      double r = std::pow(base, exponent);
      if (std::isnan(r) && !std::isnan(base) && !std::isnan(exponent))
        domain_error("invalid power", n.pos, source_);
      return r;
    }
    case Op::Min: {
      double l = eval_node(n.lhs, b), r = eval_node(n.rhs, b);
      return l < r ? l : r;
    }
    case Op::Max: {
      double l = eval_node(n.lhs, b), r = eval_node(n.rhs, b);
      return l > r ? l : r;
    }
    case Op::Abs:
      return std::fabs(eval_node(n.lhs, b));
    case Op::Exp:
      return std::exp(eval_node(n.lhs, b));
    case Op::Log: {
      double v = eval_node(n.lhs, b);
      if (v <= 0.0) domain_error("log of non-positive value", n.pos, source_);
      return std::log(v);
    }
    case Op::Sqrt: {
      double v = eval_node(n.lhs, b);
      if (v < 0.0) domain_error("sqrt of negative value", n.pos, source_);
      return std::sqrt(v);
    }
  }
  domain_error("corrupt expression node", -1, source_);
}

double Expr::eval(const Bindings& bindings) const {
  if (root_ < 0) throw Error("eval on empty expression");
  return eval_node(root_, bindings);
}

bool Expr::uses(Var v) const {
  for (const Node& n : nodes_)
    if (n.op == Op::Variable && n.var == v) return true;
  return false;
}

void Expr::dump_node(std::int32_t idx, std::string& out) const {
  const Node& n = nodes_[idx];
  switch (n.op) {
    case Op::Const:
      out += format_number(n.value);
      return;
    case Op::Variable:
      out += var_name(n.var);
      return;
    case Op::Neg:
      out += "(neg ";
      dump_node(n.lhs, out);
      out += ")";
      return;
    default:
      break;
  }
  static const char* const names[] = {"",    "",    "",    "+",   "-",
                                      "*",   "/",   "^",   "min", "max",
                                      "abs", "exp", "log", "sqrt"};
  out += "(";
  out += names[static_cast<int>(n.op)];
  out += " ";
  dump_node(n.lhs, out);
  if (n.rhs >= 0) {
    out += " ";
    dump_node(n.rhs, out);
  }
  out += ")";
}

std::string Expr::dump() const {
  if (root_ < 0) return "()";
  std::string out;
  dump_node(root_, out);
  return out;
}

Expr Expr::scaled(double factor) const {
  if (root_ < 0) throw Error("scaled on empty expression");
  Expr e = *this;
  Node c;
  c.op = Op::Const;
  c.value = factor;
  e.nodes_.push_back(c);
  Node mul;
  mul.op = Op::Mul;
  mul.lhs = e.root_;
  mul.rhs = static_cast<std::int32_t>(e.nodes_.size() - 1);
  e.nodes_.push_back(mul);
  e.root_ = static_cast<std::int32_t>(e.nodes_.size() - 1);
  return e;
}

}  // namespace trainplan
