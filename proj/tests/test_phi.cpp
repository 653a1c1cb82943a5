#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "slpart/errors.hpp"
#include "slpart/expr.hpp"
#include "slpart/phi.hpp"

using namespace slpart;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("preset values and boundary data") {
  const auto pinv = ConvexFn::power_inverse(1);
  CHECK(eval_phi(pinv, 2) == 0.25);
  CHECK(pinv.value_at_zero() == kInf);
  CHECK(pinv(0) == kInf);
  CHECK(pinv.recession() == Recession::Zero);

  const auto pw = ConvexFn::power(1);
  CHECK(pw(3) == 9.0);
  CHECK(pw(0) == 0.0);
  CHECK(pw.recession() == Recession::Infinite);
  CHECK(pw.recession_value() == kInf);

  const auto heat = ConvexFn::heat();
  CHECK(heat(1) == doctest::Approx(2.718281828).epsilon(1e-9));
  CHECK(heat(0) == kInf);
  CHECK(heat.recession_value() == 0.0);

  CHECK(ConvexFn::shifted(1, 1)(1) == 1.0);
  CHECK(ConvexFn::shifted(1, 1)(0) == 2.0);
  CHECK(ConvexFn::power(2)(0) == 0.0);
  CHECK(ConvexFn::power_inverse(0.5)(4) == 0.25);
}

TEST_CASE("parameter ranges") {
  CHECK_THROWS_AS(ConvexFn::power_inverse(0), ConfigError);
  CHECK_THROWS_AS(ConvexFn::power(0.5), ConfigError);
  CHECK_THROWS_AS(ConvexFn::shifted(0, 1), ConfigError);
  CHECK_THROWS_AS(ConvexFn::shifted(1, -1), ConfigError);
  CHECK_THROWS_AS(ConvexFn::power(1)(-0.5), ConfigError);
  CHECK_THROWS_AS(ConvexFn::power(1)(std::nan("")), ConfigError);
}

TEST_CASE("extended product") {
  CHECK(ext_mul(0.0, kInf) == 0.0);
  CHECK(ext_mul(kInf, 0.0) == 0.0);
  CHECK(ext_mul(2.0, kInf) == kInf);
  CHECK(ext_mul(2.0, 3.0) == 6.0);
}

TEST_CASE("power homogeneity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.05, 5.0);
  for (double r : {0.75, 1.0, 1.5, 3.0}) {
    const auto f = ConvexFn::power(r);
    for (int i = 0; i < 50; ++i) {
      const double c = U(rng), t = U(rng);
      CHECK(f(c * t) == doctest::Approx(std::pow(c, 2 * r) * f(t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("presets pass the sampled hypothesis checks") {
  const auto list = presets();
  CHECK(list.size() == 4);
  for (const auto& preset : list) {
    for (double r : {0.75, 1.0, 2.0}) {
      const ConvexFn f = preset.make(PhiParams{r, 1.0, 1.0});
      CAPTURE(f.describe());
      CHECK(check_hypotheses(f).empty());
    }
  }
}

TEST_CASE("null recession means non-increasing") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.05, 50.0);
  for (const auto& f : {ConvexFn::power_inverse(0.5), ConvexFn::power_inverse(2), ConvexFn::heat()}) {
    for (int i = 0; i < 100; ++i) {
      double a = U(rng), b = U(rng);
      if (a > b) std::swap(a, b);
      CHECK(f(a) >= f(b));
    }
  }
}

TEST_CASE("custom phi keeps the declared data") {
  const auto f = ConvexFn::custom(parse_expr("x^2 + 1"), 1.0, Recession::Infinite);
  CHECK(f.kind() == PhiKind::Custom);
  CHECK(f(2) == 5.0);
  CHECK(f(0) == 1.0);
  CHECK(check_hypotheses(f).empty());

  // A wrong declaration is reported but the declared data are kept.
  const auto liar = ConvexFn::custom(parse_expr("x^2"), 0.0, Recession::Zero);
  CHECK_FALSE(check_hypotheses(liar).empty());
  CHECK(liar.recession_value() == 0.0);

  const auto lin = ConvexFn::custom(parse_expr("x"), 0.0, Recession::Infinite);
  CHECK_FALSE(check_hypotheses(lin).empty());
}
