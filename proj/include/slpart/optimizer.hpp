#pragma once

#include <cstdint>
#include <vector>

#include "slpart/coefficients.hpp"
#include "slpart/partition.hpp"
#include "slpart/phi.hpp"

namespace slpart {

struct OptimizerConfig {
  int n = 1;
  int restarts = 3;
  int max_iters = 200;    // sweeps per restart
  double step_tol = 1e-7;
  std::uint64_t seed = 0;
  bool allow_empty = false;  // ignored (false) when phi(0) = +inf
  double rel_tol = 1e-10;    // eigenvalue tolerance
  int threads = 1;

  /// Throws ConfigError on n < 1, restarts < 1, max_iters < 1 or
  /// step_tol <= 0.
  void validate() const;
};

struct Optimum {
  Partition partition = Partition::uniform(1);
  double cost = 0.0;
  int iterations = 0;     // sweeps of the winning restart
  int restarts_used = 0;  // restarts that completed
  int best_restart = 0;
  std::vector<double> per_interval_lambdas;
  bool converged = false;
  /// Cost after each sweep of the winning restart, starting with the cost
  /// of its initial partition.
  std::vector<double> cost_log;
};

/// Breakpoints x_j = F^{-1}(j / n) of a density-only measure.
Partition quantile_partition(const MeasureRepr& mu, int n);

/// Multistart coordinate descent on the interior breakpoints. Restart 0
/// starts from the uniform partition, restart k from the f_infinity
/// quantiles with seeded jitter. Each sweep runs a golden-section search for
/// one breakpoint at a time inside (x_{j-1} + d, x_{j+1} - d), d = 1e-9
/// unless empty intervals are allowed, and keeps the new point only if the
/// two affected terms do not increase. Sweeps stop when no breakpoint moves
/// more than step_tol or after max_iters sweeps (converged = false). The
/// result is the lowest cost, ties to the lower restart index.
Optimum optimize(const OptimizerConfig& cfg, const CoefficientSet& cs, const ConvexFn& phi);

/// Exhaustive search for n <= 3 over breakpoints i / grid, 0 < i < grid,
/// with x_1 <= x_2 for n = 3. The first minimum in lexicographic order wins.
Optimum brute_force(int n, int grid, const CoefficientSet& cs, const ConvexFn& phi,
                    double rel_tol = 1e-10);

}  // namespace slpart
