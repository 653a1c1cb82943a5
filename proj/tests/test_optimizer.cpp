#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slpart/coefficients.hpp"
#include "slpart/errors.hpp"
#include "slpart/gamma.hpp"
#include "slpart/optimizer.hpp"
#include "slpart/phi.hpp"

using namespace slpart;

namespace {

constexpr double kPi = std::numbers::pi;

CoefficientSet two_level_w() {
  return CoefficientSet{Coefficient::constant(1), Coefficient::constant(0),
                        PiecewiseTable({{0.0, 0.5, 4.0}, {0.5, 1.0, 1.0}}), 4};
}

CoefficientSet linear_w() {
  return CoefficientSet{Coefficient::constant(1), Coefficient::constant(0), Coefficient::expression("1+x"), 2};
}

OptimizerConfig config(int n, std::uint64_t seed = 1) {
  OptimizerConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.restarts = 2;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  OptimizerConfig cfg;
  cfg.n = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OptimizerConfig{};
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OptimizerConfig{};
  cfg.step_tol = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_NOTHROW(OptimizerConfig{}.validate());
}

TEST_CASE("constant coefficients give the uniform partition") {
  const auto cs = constant_coefficients(1, 0, 1, 2);
  for (int n : {2, 5}) {
    const Optimum o = optimize(config(n), cs, ConvexFn::power(1));
    CHECK(o.converged);
    CHECK(o.cost == doctest::Approx(1 / (kPi * kPi)).epsilon(1e-9));
    for (int j = 0; j <= n; ++j) CHECK(std::abs(o.partition.breakpoints()[j] - static_cast<double>(j) / n) < 1e-5);
    REQUIRE(o.per_interval_lambdas.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("brute force examples") {
  const auto cs = constant_coefficients(1, 0, 1, 2);
  const auto phi = ConvexFn::power(1);
  const Optimum one = brute_force(1, 10, cs, phi);
  CHECK(one.cost == doctest::Approx(phi(1 / kPi)).epsilon(1e-12));
  const Optimum two = brute_force(2, 200, cs, phi);
  CHECK(two.partition.breakpoints()[1] == 0.5);
  const Optimum three = brute_force(3, 120, cs, phi);
  CHECK(three.partition.breakpoints()[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(three.partition.breakpoints()[2] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK_THROWS_AS(brute_force(4, 10, cs, phi), ConfigError);
  CHECK_THROWS_AS(brute_force(2, 401, cs, phi), ConfigError);
}

TEST_CASE("optimize agrees with brute force") {
  const auto cs = linear_w();
  for (const auto& phi : {ConvexFn::power(1), ConvexFn::power(1.5)}) {
    for (int n : {2, 3}) {
      const int grid = n == 2 ? 200 : 100;
      const Optimum bf = brute_force(n, grid, cs, phi);
      const Optimum o = optimize(config(n), cs, phi);
      CHECK(o.cost <= bf.cost + 1e-12);
      CHECK(std::abs(o.cost - bf.cost) <= 1e-4);
      for (int j = 1; j < n; ++j)
        CHECK(std::abs(o.partition.breakpoints()[j] - bf.partition.breakpoints()[j]) <= 2.0 / grid);
    }
  }
}

TEST_CASE("descent log, feasibility and strict convexity") {
  const auto cs = two_level_w();
  OptimizerConfig cfg = config(6, 9);
  const Optimum o = optimize(cfg, cs, ConvexFn::power(1.5));
  REQUIRE_FALSE(o.cost_log.empty());
  for (std::size_t i = 1; i < o.cost_log.size(); ++i) CHECK(o.cost_log[i] <= o.cost_log[i - 1]);
  CHECK(o.cost_log.back() == o.cost);
  const auto& x = o.partition.breakpoints();
  CHECK(x.front() == 0.0);
  CHECK(x.back() == 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  CHECK(o.partition.min_length() > 1e-9);
  CHECK(o.cost == doctest::Approx(cost_Fn(o.partition, cs, ConvexFn::power(1.5), 1e-10)).epsilon(1e-9));
}

TEST_CASE("fixed seed is deterministic; threads do not change the result") {
  const auto cs = two_level_w();
  OptimizerConfig cfg = config(5, 123);
  cfg.restarts = 3;
  const Optimum a = optimize(cfg, cs, ConvexFn::power(1));
  const Optimum b = optimize(cfg, cs, ConvexFn::power(1));
  cfg.threads = 3;
  const Optimum c = optimize(cfg, cs, ConvexFn::power(1));
  CHECK(a.cost == b.cost);
  CHECK(a.partition.breakpoints() == b.partition.breakpoints());
  CHECK(a.cost == c.cost);
  CHECK(a.partition.breakpoints() == c.partition.breakpoints());
  CHECK(a.restarts_used == 3);
}

TEST_CASE("quantile partition") {
  const MeasureRepr uniform{{{0.0, 1.0, 1.0}}, {}};
  const auto P = quantile_partition(uniform, 4);
  for (int j = 0; j <= 4; ++j) CHECK(P.breakpoints()[j] == doctest::Approx(j / 4.0).epsilon(1e-15));
  const MeasureRepr skew{{{0.0, 0.5, 4.0 / 3}, {0.5, 1.0, 2.0 / 3}}, {}};
  const auto Q = quantile_partition(skew, 3);
  CHECK(Q.breakpoints()[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(Q.breakpoints()[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("empty intervals are reachable only when allowed") {
  const auto cs = constant_coefficients(1, 0, 1, 2);
  OptimizerConfig cfg = config(3);
  cfg.allow_empty = true;
  const Optimum o = optimize(cfg, cs, ConvexFn::power_inverse(1));
  CHECK(std::isfinite(o.cost));
  CHECK(o.partition.min_length() > 0);
}
