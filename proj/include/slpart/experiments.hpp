#pragma once

#include <array>
#include <vector>

#include "slpart/coefficients.hpp"
#include "slpart/optimizer.hpp"
#include "slpart/phi.hpp"

namespace slpart {

struct AsymptoticRow {
  int n = 0;
  double optimal_cost = 0.0;
  double limit_cost = 0.0;
  double cost_gap = 0.0;  // optimal_cost - limit_cost
  double w1 = 0.0;        // W1(empirical measure, f_infinity)
  std::array<double, 8> portions{};  // mass of (k/8, (k+1)/8)
  bool converged = false;
  int iterations = 0;
};

struct AsymptoticReport {
  std::vector<AsymptoticRow> rows;
};

/// Optimizes for each n (cfg.n is overwritten) and compares the optimal
/// partition with the predicted limit. n_list must be strictly increasing.
/// Rows whose descent hit max_iters are kept with converged = false.
AsymptoticReport asymptotic_study(const CoefficientSet& cs, const ConvexFn& phi,
                                  const std::vector<int>& n_list, const OptimizerConfig& cfg);

struct BLiebRow {
  double x = 0.0;
  double lhs = 0.0;  // lambda((0,x))^(-1/2) + lambda((x,1))^(-1/2)
  double rhs = 0.0;  // lambda((0,1))^(-1/2)
  double tol = 0.0;  // propagated eigenvalue uncertainty of lhs - rhs
  bool holds = false;
  bool valid = true;  // false when some eigenvalue is not positive
};

struct BLiebReport {
  std::vector<BLiebRow> rows;
};

/// Checks the splitting inequality at x_i = i / (grid + 1), i = 1..grid.
/// holds = lhs >= rhs - 10 tol. Rows with a non-positive eigenvalue are
/// flagged invalid instead of compared.
BLiebReport brascamp_lieb_sweep(const CoefficientSet& cs, int grid, double rel_tol = 1e-10,
                                int threads = 1);

}  // namespace slpart
