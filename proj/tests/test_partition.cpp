#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "slpart/coefficients.hpp"
#include "slpart/errors.hpp"
#include "slpart/partition.hpp"
#include "slpart/phi.hpp"

using namespace slpart;

namespace {

constexpr double kPi = std::numbers::pi;

Partition random_partition(std::mt19937_64& rng, int n, bool allow_ties) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> x;
  for (int i = 1; i < n; ++i) x.push_back(U(rng));
  if (allow_ties && n > 2) x[1] = x[0];
  x.insert(x.begin(), 0.0);
  x.push_back(1.0);
  std::sort(x.begin(), x.end());
  return Partition(x);
}

// Oracle: CDF by direct summation, integrated with a fine midpoint rule.
double cdf(const MeasureRepr& mu, double t) {
  double m = 0;
  for (const auto& c : mu.cells) m += c.height * std::clamp(t - c.lo, 0.0, c.hi - c.lo);
  for (const auto& a : mu.atoms) m += a.x <= t ? a.mass : 0.0;
  return m;
}

double w1_midpoint(const MeasureRepr& a, const MeasureRepr& b, int samples = 200000) {
  double s = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = (i + 0.5) / samples;
    s += std::abs(cdf(a, t) - cdf(b, t));
  }
  return s / samples;
}

MeasureRepr uniform_measure() { return MeasureRepr{{{0.0, 1.0, 1.0}}, {}}; }
MeasureRepr dirac(double x) { return MeasureRepr{{}, {{x, 1.0}}}; }

}  // namespace

TEST_CASE("partition construction") {
  CHECK(Partition::uniform(4).breakpoints() == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(Partition({0, 0.5, 0.5, 1}).n() == 3);
  CHECK(Partition({0, 0.5, 0.5, 1}).min_length() == 0.0);
  CHECK_THROWS_AS(Partition({0, 0.6, 0.5, 1}), ConfigError);
  CHECK_THROWS_AS(Partition({0.1, 1}), ConfigError);
  CHECK_THROWS_AS(Partition({0, 0.9}), ConfigError);
  CHECK_THROWS_AS(Partition({0}), ConfigError);
  const auto J = Partition({0, 0.3, 1}).interval(2);
  CHECK(J.lo == 0.3);
  CHECK(J.hi == 1.0);
}

TEST_CASE("cost examples") {
  const auto cs = constant_coefficients(1, 0, 1, 2);
  const auto phi = ConvexFn::power(1);
  for (int n : {1, 3, 8}) CHECK(cost_Fn(Partition::uniform(n), cs, phi) == doctest::Approx(1 / (kPi * kPi)).epsilon(1e-12));
  CHECK(cost_Fn(Partition({0, 0.25, 1}), cs, phi) == doctest::Approx(1.25 / (kPi * kPi)).epsilon(1e-12));
  CHECK(cost_Fn(Partition({0, 0.25, 1}), cs, phi) == doctest::Approx(0.126651).epsilon(1e-5));
  CHECK(std::isinf(cost_Fn(Partition({0, 0.4, 0.4, 1}), cs, ConvexFn::power_inverse(1))));
  // phi(0) = 0 for an empty interval under power(1).
  const double two = cost_Fn(Partition({0, 0.5, 0.5, 1}), cs, phi);
  CHECK(two == doctest::Approx((2.0 / 3) * std::pow(3 * 0.5 / kPi, 2)).epsilon(1e-12));
}

TEST_CASE("breakdown lists per-interval data") {
  const auto b = evaluate_cost(Partition({0, 0.5, 0.5, 1}), constant_coefficients(1, 0, 1, 2), ConvexFn::power(1));
  REQUIRE(b.lambdas.size() == 3);
  CHECK(std::isinf(b.lambdas[1]));
  CHECK(b.terms[1] == 0.0);
  CHECK(b.lambdas[0] == doctest::Approx(4 * kPi * kPi));
}

TEST_CASE("constant-coefficient cost matches the closed-form sum") {
  std::mt19937_64 rng(31);
  const double p = 1.4, w = 0.8, q = 0.0, s = std::sqrt(w / p);
  const auto cs = constant_coefficients(p, q, w, 2);
  const auto phis = {ConvexFn::power(1), ConvexFn::power(1.7), ConvexFn::shifted(0.5, 1), ConvexFn::power_inverse(1)};
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const Partition P = random_partition(rng, n, false);
    for (const auto& phi : phis) {
      double expect = 0;
      for (int j = 1; j <= n; ++j) expect += phi(n * s * P.interval(j).length() / kPi);
      expect /= n;
      CHECK(cost_Fn(P, cs, phi) == doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("threaded cost equals serial cost bit for bit") {
  const auto cs = CoefficientSet{Coefficient::constant(1), Coefficient::constant(0), Coefficient::expression("1+x"), 2};
  const Partition P({0, 0.1, 0.35, 0.6, 0.61, 1});
  CostOptions serial, threaded;
  threaded.threads = 3;
  CHECK(evaluate_cost(P, cs, ConvexFn::power(1), serial).cost ==
        evaluate_cost(P, cs, ConvexFn::power(1), threaded).cost);
}

TEST_CASE("empirical measure examples") {
  const auto u = empirical_measure(Partition::uniform(4));
  REQUIRE(u.cells.size() == 4);
  for (const auto& c : u.cells) CHECK(c.height == doctest::Approx(1.0));
  CHECK(u.atoms.empty());
  CHECK(u.total_mass() == doctest::Approx(1.0).epsilon(1e-15));

  const auto e = empirical_measure(Partition({0, 0, 1}));
  REQUIRE(e.atoms.size() == 1);
  CHECK(e.atoms[0].x == 0.0);
  CHECK(e.atoms[0].mass == 0.5);
  REQUIRE(e.cells.size() == 1);
  CHECK(e.cells[0].height == 0.5);

  const auto t = empirical_measure(Partition({0, 0.5, 0.5, 1}));
  REQUIRE(t.cells.size() == 2);
  CHECK(t.cells[0].height == doctest::Approx(2.0 / 3));
  CHECK(t.cells[1].height == doctest::Approx(2.0 / 3));
  REQUIRE(t.atoms.size() == 1);
  CHECK(t.atoms[0].x == 0.5);
  CHECK(t.atoms[0].mass == doctest::Approx(1.0 / 3));
}

TEST_CASE("empirical measures are probability measures") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Partition P = random_partition(rng, 1 + static_cast<int>(rng() % 40), i % 3 == 0);
    const auto mu = empirical_measure(P);
    CHECK(std::abs(mu.total_mass() - 1.0) <= 1e-12);
    CHECK_NOTHROW(mu.validate());
    CHECK(portion_count(P, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Atoms sit at breakpoints; one at an end of (0, 1) is outside the open set.
  const Partition edge({0, 0.5, 1, 1});
  CHECK(portion_count(edge, 0, 1) == doctest::Approx(2.0 / 3));
  CHECK(portion_count(edge, -0.1, 1.1) == doctest::Approx(1.0));
}

TEST_CASE("portion count examples") {
  CHECK(portion_count(Partition::uniform(4), 0, 0.5) == doctest::Approx(0.5));
  CHECK(portion_count(Partition::uniform(4), 0, 0.375) == doctest::Approx(0.375));
  CHECK(portion_count(Partition({0, 0, 1}), -0.1, 0.5) == doctest::Approx(0.75));
  CHECK(portion_count(Partition({0, 0, 1}), 0.0, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS((MeasureRepr{{{0, 0.5, 1.0}}, {}}.validate()), ConfigError);
  CHECK_THROWS_AS((MeasureRepr{{{0, 0.6, 1.0}, {0.5, 1, 1.0}}, {}}.validate()), ConfigError);
  CHECK_THROWS_AS((MeasureRepr{{{0, 1, 1.0}}, {{0.5, -0.1}}}.validate()), ConfigError);
  CHECK_NOTHROW((MeasureRepr{{{0, 0.5, 1.0}}, {{0.7, 0.5}}}.validate()));
}

TEST_CASE("wasserstein examples") {
  CHECK(wasserstein1(uniform_measure(), uniform_measure()) == 0.0);
  CHECK(wasserstein1(dirac(0), dirac(1)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wasserstein1(uniform_measure(), dirac(0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(wasserstein1(uniform_measure(), MeasureRepr{{}, {{0.5, 0.5}}}), ConfigError);
}

TEST_CASE("wasserstein against a midpoint-rule oracle") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 8; ++i) {
    const auto a = empirical_measure(random_partition(rng, 2 + i, i % 2 == 0));
    const auto b = empirical_measure(random_partition(rng, 3 + 2 * i, false));
    CHECK(std::abs(wasserstein1(a, b) - w1_midpoint(a, b)) < 1e-5);
  }
}

TEST_CASE("wasserstein is a metric on samples") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const auto a = empirical_measure(random_partition(rng, 1 + static_cast<int>(rng() % 9), i % 2 == 0));
    const auto b = empirical_measure(random_partition(rng, 1 + static_cast<int>(rng() % 9), i % 3 == 0));
    const auto c = empirical_measure(random_partition(rng, 1 + static_cast<int>(rng() % 9), false));
    CHECK(wasserstein1(a, b) == wasserstein1(b, a));
    CHECK(wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-12);
    CHECK(wasserstein1(a, a) == 0.0);
  }
}

TEST_CASE("pairwise sum") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(cost_term(ConvexFn::power(1), 2, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(cost_term(ConvexFn::power(1), 2, -1.0), SolverError);
}
