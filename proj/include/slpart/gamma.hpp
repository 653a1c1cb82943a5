#pragma once

#include <vector>

#include "slpart/coefficients.hpp"
#include "slpart/partition.hpp"
#include "slpart/phi.hpp"

namespace slpart {

/// Density alpha_i on each block J_i = ((i-1)/m, i/m), with sum alpha_i = m.
struct PiecewiseConstMeasure {
  int m = 1;
  std::vector<double> alphas;

  /// Throws ConfigError unless m >= 1, there are m non-negative heights and
  /// they sum to m within 1e-9 m.
  void validate() const;
  /// Blocks with alpha_i = 0.
  int zero_blocks() const;
  MeasureRepr to_measure() const;
};

/// f(x) = s(x) / integral of s, as a piecewise-constant density. With p and
/// w both piecewise constant the cells are the pieces between their knots
/// and the result is exact; otherwise `grid` uniform cells carry the cell
/// mean of s.
MeasureRepr f_infinity(const CoefficientSet& cs, int grid);

/// Limit functional: integral over {f > 0} of phi(s / (pi f)) f, plus
/// phi_inf times the length of {f = 0}, plus phi(0) times the atom mass.
/// {f = 0} is the uncovered part of [0, 1] plus zero-height cells.
double F_infinity(const MeasureRepr& mu, const CoefficientSet& cs, const ConvexFn& phi,
                  double tol = 1e-11);

/// phi(integral of s / pi).
double limit_cost(const CoefficientSet& cs, const ConvexFn& phi);

struct RecoveryPlan {
  int n = 0;
  int m0 = 0;                // blocks with alpha_i = 0
  std::vector<int> k;        // intervals per block
  std::vector<int> gammas;   // corrector bits, 0 on zero blocks
};

struct Recovery {
  Partition partition;
  RecoveryPlan plan;
};

/// Zero blocks get the single interval J_i; block i with alpha_i > 0 is cut
/// into k_i = floor(alpha_i (n - m0) / m) + gamma_i equal intervals. The
/// correctors go to the largest fractional remainders, ties to the lower
/// index. Throws ConfigError when n < m or when some positive block would
/// receive no interval.
Recovery recovery_partition(const PiecewiseConstMeasure& mu, int n);

struct RecoveryRow {
  int n = 0;
  double cost = 0.0;        // F_n of the recovery partition
  double F_infinity = 0.0;
  double gap = 0.0;         // cost - F_infinity
  double rel_gap = 0.0;     // gap / |F_infinity|
  double w1 = 0.0;          // W1(empirical measure, mu)
};

std::vector<RecoveryRow> verify_recovery(const PiecewiseConstMeasure& mu, const CoefficientSet& cs,
                                         const ConvexFn& phi, const std::vector<int>& n_list,
                                         double rel_tol = 1e-10, int threads = 1);

}  // namespace slpart
