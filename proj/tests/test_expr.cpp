#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slpart/errors.hpp"
#include "slpart/expr.hpp"

using namespace slpart;

TEST_CASE("literal, pi and arithmetic") {
  CHECK(parse_expr("1")(0.0) == 1.0);
  CHECK(parse_expr("1")(0.73) == 1.0);
  CHECK(parse_expr("pi^2")(0.3) == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-15));
  CHECK(parse_expr("1 + x*x")(0.5) == 1.25);
  CHECK(parse_expr("sin(pi*x)")(0.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("precedence and associativity") {
  CHECK(parse_expr("1 + 2 * 3")(0) == 7.0);
  CHECK(parse_expr("(1 + 2) * 3")(0) == 9.0);
  CHECK(parse_expr("2^3^2")(0) == 512.0);
  CHECK(parse_expr("-2^2")(0) == -4.0);
  CHECK(parse_expr("2^-1")(0) == 0.5);
  CHECK(parse_expr("8 / 4 / 2")(0) == 1.0);
  CHECK(parse_expr("1 - 2 - 3")(0) == -4.0);
  CHECK(parse_expr("--x")(0.25) == 0.25);
  CHECK(parse_expr("1.5e1 + .5")(0) == 15.5);
}

TEST_CASE("functions") {
  CHECK(parse_expr("min(x, 0.5)")(0.7) == 0.5);
  CHECK(parse_expr("max(x, 0.5)")(0.7) == 0.7);
  CHECK(parse_expr("abs(x - 1)")(0.25) == 0.75);
  CHECK(parse_expr("sqrt(4*x)")(1.0) == 2.0);
  CHECK(parse_expr("exp(0)")(0.3) == 1.0);
  CHECK(parse_expr("cos(0)")(0.3) == 1.0);
}

TEST_CASE("constness flag") {
  CHECK(parse_expr("pi^2 + 3").is_constant());
  CHECK_FALSE(parse_expr("1 + 0*x").is_constant());
}

TEST_CASE("errors carry offsets") {
  auto offset_of = [](const char* src) {
    try {
      parse_expr(src);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1L;
  };
  CHECK(offset_of("1 + y") == 4);
  CHECK(offset_of("tan(x)") == 0);
  CHECK(offset_of("min(x)") >= 0);
  CHECK(offset_of("sin(x, 1)") >= 0);
  CHECK(offset_of("1 +") == 3);
  CHECK(offset_of("(1 + x") == 6);
  CHECK(offset_of("1 2") == 2);
  CHECK(offset_of("") == 0);
  CHECK(offset_of("x $ 2") == 2);
}

TEST_CASE("round trip through to_string") {
  const char* sources[] = {"1 + x*x",         "sin(pi*x)^2 - 3/(1+x)", "-x^2 + min(x, 1 - x)",
                           "2^3^x",           "exp(-x) * sqrt(1 + x)", "abs(x - 0.3) / max(0.1, x)",
                           "0.1 + 1e-3 * x", "--x - -1"};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const char* src : sources) {
    const CoeffExpr a = parse_expr(src);
    const CoeffExpr b = parse_expr(a.to_string());
    CHECK(b.to_string() == a.to_string());
    for (int i = 0; i < 100; ++i) {
      const double x = U(rng);
      CHECK(b(x) == a(x));
    }
  }
}
