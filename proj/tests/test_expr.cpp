#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "trainplan/expr.hpp"

using namespace trainplan;

namespace {

Bindings bind(double x = 0, double t = 0, double a = 0, double tau = 0,
              double stage = 1) {
  Bindings b;
  b.set(Var::X, x).set(Var::T, t).set(Var::A, a).set(Var::Tau, tau).set(
      Var::Stage, stage);
  return b;
}

double eval(const std::string& src, const Bindings& b = bind()) {
  return Expr::parse(src).eval(b);
}

}  // namespace

TEST_CASE("two-token expression parses to the expected tree") {
  CHECK(Expr::parse("t - a").dump() == "(- t a)");
  CHECK(Expr::parse("min(t, a)").dump() == "(min t a)");
  CHECK(Expr::parse("-x").dump() == "(neg x)");
}

TEST_CASE("precedence") {
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("(1 + 2) * 3") == 9.0);
  CHECK(eval("6 / 2 - 1") == 2.0);
  // right-associative power: 2^(3^2)
  CHECK(eval("2^3^2") == 512.0);
  CHECK(eval("2^3*2") == 16.0);
  // unary minus binds looser than ^
  CHECK(eval("-2^2") == -4.0);
  CHECK(eval("(-2)^2") == 4.0);
  CHECK(eval("2^-2") == 0.25);
}

TEST_CASE("precedence holds on random integer triples") {
  std::mt19937 rng(20240117);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int i = 0; i < 200; ++i) {
    int p = d(rng), q = d(rng), r = d(rng);
    std::string ps = std::to_string(p), qs = std::to_string(q),
                rs = std::to_string(r);
    CHECK(eval(ps + " + " + qs + " * " + rs) ==
          static_cast<double>(p + q * r));
    CHECK(eval("(" + ps + " + " + qs + ") * " + rs) ==
          static_cast<double>((p + q) * r));
  }
}

TEST_CASE("truncated input reports the error position") {
  try {
    Expr::parse("t +");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseError::Kind::Syntax);
    CHECK(e.position == 3);
  }
  CHECK_THROWS_AS(Expr::parse(""), ParseError);
  CHECK_THROWS_AS(Expr::parse("(t"), ParseError);
  CHECK_THROWS_AS(Expr::parse("t ) a"), ParseError);
}

TEST_CASE("unknown identifiers and functions are rejected") {
  try {
    Expr::parse("foo + 1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseError::Kind::UnknownIdentifier);
    CHECK(e.position == 0);
  }
  CHECK_THROWS_AS(Expr::parse("sinh(x)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("min(x)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("abs(x, t)"), ParseError);
}

TEST_CASE("evaluation") {
  CHECK(eval("x^2 + t", bind(3, 1)) == 10.0);
  CHECK(eval("min(t, a)", bind(0, 2, 1)) == 1.0);
  CHECK(eval("max(t, a)", bind(0, 2, 1)) == 2.0);
  CHECK(eval("abs(0 - a)", bind(0, 0, 2.5)) == 2.5);
  CHECK(eval("exp(0)") == 1.0);
  CHECK(eval("log(exp(1))") == doctest::Approx(1.0));
  CHECK(eval("sqrt(x)", bind(9)) == 3.0);
  CHECK(eval("tau + stage", bind(0, 0, 0, 1.5, 2)) == 3.5);
}

TEST_CASE("domain errors identify the offending operation") {
  try {
    eval("1/(x-1)", bind(1));
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.kind == EvalError::Kind::Domain);
    CHECK(std::string(e.what()).find("division by zero") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(eval("log(x)", bind(0)), EvalError);
  CHECK_THROWS_AS(eval("log(x)", bind(-1)), EvalError);
  CHECK_THROWS_AS(eval("sqrt(x)", bind(-4)), EvalError);
  CHECK_THROWS_AS(eval("(-1)^0.5"), EvalError);
}

TEST_CASE("unbound variables are reported") {
  Expr e = Expr::parse("x + tau");
  Bindings b;
  b.set(Var::X, 1.0);
  try {
    e.eval(b);
    FAIL("expected EvalError");
  } catch (const EvalError& err) {
    CHECK(err.kind == EvalError::Kind::UnboundVariable);
    CHECK(std::string(err.what()).find("tau") != std::string::npos);
  }
}

TEST_CASE("whitespace does not change the value") {
  const char* dense = "x^2+min(t,a)*3-tau/2";
  const char* spaced = " x ^ 2 + min( t , a ) * 3 - tau / 2 ";
  const char* newlines = "x^2\n+ min(t, a)\t* 3 - tau / 2";
  Bindings b = bind(1.5, 2.0, -0.5, 4.0);
  double v = eval(dense, b);
  CHECK(eval(spaced, b) == v);
  CHECK(eval(newlines, b) == v);
}

TEST_CASE("repeated evaluation is bit-identical") {
  Expr e = Expr::parse("exp(x) * log(t + 2) - sqrt(a + 1) ^ 1.5");
  Bindings b = bind(0.3, 0.7, 0.11, 5.0);
  double v1 = e.eval(b);
  double v2 = e.eval(b);
  CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
}

TEST_CASE("uses reports referenced variables") {
  Expr e = Expr::parse("x + tau");
  CHECK(e.uses(Var::X));
  CHECK(e.uses(Var::Tau));
  CHECK_FALSE(e.uses(Var::T));
  CHECK_FALSE(e.uses(Var::Stage));
}

TEST_CASE("scaled multiplies the value") {
  Expr e = Expr::parse("t + 1");
  Expr half = e.scaled(0.5);
  Bindings b = bind(0, 3);
  CHECK(half.eval(b) == 2.0);
  CHECK(e.eval(b) == 4.0);  // original untouched
}
