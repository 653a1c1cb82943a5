#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "slpart/coefficients.hpp"
#include "slpart/errors.hpp"

using namespace slpart;

namespace {

PiecewiseTable four_one() { return PiecewiseTable({{0.0, 0.5, 4.0}, {0.5, 1.0, 1.0}}); }

CoefficientSet make(Coefficient p, Coefficient q, Coefficient w, double beta) {
  return CoefficientSet{std::move(p), std::move(q), std::move(w), beta};
}

}  // namespace

TEST_CASE("table lookup is half-open") {
  const Coefficient t = four_one();
  CHECK(t(0.25) == 4.0);
  CHECK(t(0.5) == 1.0);
  CHECK(t(0.0) == 4.0);
  CHECK(t(1.0) == 1.0);
  CHECK(t.is_piecewise_constant());
  CHECK(t.knots() == std::vector<double>{0.5});
}

TEST_CASE("tables must tile the unit interval") {
  CHECK_THROWS_AS(PiecewiseTable({{0.0, 0.4, 1.0}, {0.5, 1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(PiecewiseTable({{0.0, 0.5, 1.0}}), ConfigError);
  CHECK_THROWS_AS(PiecewiseTable({{0.1, 1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(PiecewiseTable({}), ConfigError);
}

TEST_CASE("expression evaluation") {
  const Coefficient c = Coefficient::expression("sin(pi*x)");
  CHECK(c(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Coefficient::expression("sqrt(x - 2)")(0.5), EvalError);
  CHECK_THROWS_AS(Coefficient::constant(1.0)(1.5), EvalError);
}

TEST_CASE("s is sqrt(w/p)") {
  CHECK(constant_coefficients(1, 0, 4, 4).s(0.3) == 2.0);
  CHECK(constant_coefficients(4, 0, 1, 4).s(0.3) == 0.5);
  const auto cs = make(Coefficient::expression("1+x"), Coefficient::constant(0), Coefficient::expression("1+x"), 2);
  for (double x : {0.0, 0.2, 0.77, 1.0}) CHECK(s_of(cs, x) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("validation") {
  CHECK(validate(constant_coefficients(1, 0, 1, 2)).ok());
  CHECK(validate(constant_coefficients(1, 0, 2, 2)).ok());  // bounds are inclusive
  CHECK(validate(constant_coefficients(0.5, 2, 2, 2)).ok());
  CHECK_FALSE(validate(constant_coefficients(1, 0, 4, 2)).ok());  // w = 4 > beta
  const auto neg_q = make(Coefficient::constant(1), Coefficient::expression("-1"), Coefficient::constant(1), 2);
  const auto report = validate(neg_q);
  CHECK_FALSE(report.ok());
  CHECK(report.summary().find("q") != std::string::npos);
  ValidationOptions relaxed;
  relaxed.relax_q = true;
  CHECK(validate(neg_q, relaxed).ok());

  const auto bad = make(Coefficient::expression("0.1 + x"), Coefficient::constant(3), Coefficient::constant(1), 2);
  const auto r2 = validate(bad);
  CHECK_FALSE(r2.ok());
  int failed = 0;
  for (const auto& c : r2.checks) failed += c.ok ? 0 : 1;
  CHECK(failed >= 3);  // p below 1/beta, q above beta, s above beta
}

TEST_CASE("validated sets keep s within bounds on the grid") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.55, 1.8);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = U(rng), b = U(rng);
    const auto cs = make(Coefficient::expression(std::to_string(a) + " + 0.1*sin(3*x)"), Coefficient::constant(0),
                         Coefficient::expression(std::to_string(b) + " - 0.1*x"), 2.0);
    ValidationOptions opt;
    opt.samples = 1000;
    const auto r = validate(cs, opt);
    if (!r.ok()) continue;
    for (int i = 0; i < 1000; ++i) {
      const double x = static_cast<double>(i) / 999;
      CHECK(s_of(cs, x) >= 0.5);
      CHECK(s_of(cs, x) <= 2.0);
    }
  }
}

TEST_CASE("integrate_s values") {
  CHECK(integrate_s(constant_coefficients(1, 0, 1, 2), 0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  const auto pw = make(Coefficient::constant(1), Coefficient::constant(0), four_one(), 4);
  CHECK(integrate_s(pw, 0, 1) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(integrate_s(pw, 0.25, 0.75) == doctest::Approx(0.75).epsilon(1e-15));
  const auto sq = make(Coefficient::constant(1), Coefficient::constant(0), Coefficient::expression("1+x"), 2);
  const double exact = (2.0 / 3) * (std::pow(2.0, 1.5) - 1);
  CHECK(std::abs(integrate_s(sq, 0, 1) - exact) < 1e-12);
  CHECK(std::abs(integrate_s(sq, 0, 1) - 1.218951) < 1e-6);
}

TEST_CASE("integrate_s is additive") {
  const auto cs = make(Coefficient::expression("1 + 0.5*sin(5*x)"), Coefficient::constant(0),
                       Coefficient::expression("exp(x)"), 3);
  const double tol = 1e-11;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    double v[3] = {U(rng), U(rng), U(rng)};
    std::sort(v, v + 3);
    const double whole = integrate_s(cs, v[0], v[2], tol);
    const double parts = integrate_s(cs, v[0], v[1], tol) + integrate_s(cs, v[1], v[2], tol);
    CHECK(std::abs(whole - parts) <= 2 * tol);
  }
}

TEST_CASE("merged knots") {
  const auto cs = make(PiecewiseTable({{0.0, 0.3, 1.0}, {0.3, 1.0, 2.0}}), Coefficient::constant(0), four_one(), 4);
  CHECK(cs.knots() == std::vector<double>{0.3, 0.5});
  CHECK(cs.is_piecewise_constant());
}
