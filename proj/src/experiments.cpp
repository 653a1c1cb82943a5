#include "slpart/experiments.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "slpart/errors.hpp"
#include "slpart/gamma.hpp"
#include "slpart/parallel.hpp"

namespace slpart {
namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Closed-form solves report no error estimate, so the requested tolerance
// is the floor.
struct Eig {
  double lambda;
  double err;  // max(error estimate, rel_tol * lambda)
};

Eig solve(const Interval& J, const CoefficientSet& cs, double rel_tol) {
  const EigenResult r = first_eigenvalue(J, cs, rel_tol);
  return {r.lambda, std::max(r.error_estimate, rel_tol * std::fabs(r.lambda))};
}

// Uncertainty of lambda^(-1/2) from an uncertainty of lambda.
double inv_sqrt_err(const Eig& e) { return 0.5 * e.err / (e.lambda * std::sqrt(e.lambda)); }
}  // namespace

AsymptoticReport asymptotic_study(const CoefficientSet& cs, const ConvexFn& phi,
                                  const std::vector<int>& n_list, const OptimizerConfig& cfg) {
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
      throw ConfigError("n list must be positive and strictly increasing");
    }
  }
  AsymptoticReport report;
  if (n_list.empty()) return report;
  const double limit = limit_cost(cs, phi);
  const MeasureRepr target = f_infinity(cs, std::max(1024, 16 * n_list.back()));

  for (int n : n_list) {
    OptimizerConfig c = cfg;
    c.n = n;
    const Optimum opt = optimize(c, cs, phi);
    AsymptoticRow row;
    row.n = n;
    row.optimal_cost = opt.cost;
    row.limit_cost = limit;
    row.cost_gap = opt.cost - limit;
    row.w1 = wasserstein1(empirical_measure(opt.partition), target);
    for (int k = 0; k < 8; ++k) row.portions[k] = portion_count(opt.partition, k / 8.0, (k + 1) / 8.0);
    row.converged = opt.converged;
    row.iterations = opt.iterations;
    report.rows.push_back(row);
  }
  return report;
}

BLiebReport brascamp_lieb_sweep(const CoefficientSet& cs, int grid, double rel_tol, int threads) {
  if (grid < 1) throw ConfigError(fmt::format("grid must be >= 1, got {}", grid));
  const Eig whole = solve({0.0, 1.0}, cs, rel_tol);
  BLiebReport report;
  report.rows.resize(grid);
  parallel_for(static_cast<std::size_t>(grid), threads, [&](std::size_t i) {
    BLiebRow& row = report.rows[i];
    row.x = static_cast<double>(i + 1) / (grid + 1);
    const Eig left = solve({0.0, row.x}, cs, rel_tol);
    const Eig right = solve({row.x, 1.0}, cs, rel_tol);
    if (!(left.lambda > 0.0 && right.lambda > 0.0 && whole.lambda > 0.0)) {
      row.valid = false;
      row.lhs = row.rhs = row.tol = kNaN;
      return;
    }
    row.lhs = 1.0 / std::sqrt(left.lambda) + 1.0 / std::sqrt(right.lambda);
    row.rhs = 1.0 / std::sqrt(whole.lambda);
    row.tol = inv_sqrt_err(left) + inv_sqrt_err(right) + inv_sqrt_err(whole);
    row.holds = row.lhs >= row.rhs - 10.0 * row.tol;
  });
  return report;
}

}  // namespace slpart
