#pragma once

#include <span>
#include <vector>

#include "slpart/coefficients.hpp"
#include "slpart/phi.hpp"
#include "slpart/sl_solver.hpp"

namespace slpart {

/// n-interval partition of (0, 1): breakpoints 0 = x_0 <= ... <= x_n = 1.
/// Coincident breakpoints are allowed and give empty intervals.
class Partition {
 public:
  /// Throws ConfigError unless the breakpoints are finite, non-decreasing
  /// and pinned to 0 and 1.
  explicit Partition(std::vector<double> breakpoints);

  static Partition uniform(int n);

  int n() const noexcept { return static_cast<int>(x_.size()) - 1; }
  const std::vector<double>& breakpoints() const noexcept { return x_; }
  /// I_j = (x_{j-1}, x_j) for j = 1..n.
  Interval interval(int j) const { return {x_[j - 1], x_[j]}; }
  double min_length() const;

 private:
  std::vector<double> x_;
};

struct DensityCell {
  double lo;
  double hi;
  double height;
};

struct Atom {
  double x;
  double mass;
};

/// Probability measure on [0, 1]: piecewise-constant density plus atoms.
struct MeasureRepr {
  std::vector<DensityCell> cells;  // sorted, non-overlapping
  std::vector<Atom> atoms;

  double total_mass() const;
  /// Throws ConfigError unless cells are sorted, disjoint, inside [0, 1]
  /// with non-negative heights, atoms have positive mass and the total mass
  /// is 1 within `tol`.
  void validate(double tol = 1e-12) const;
};

/// Sum in a fixed pairwise order, independent of how terms were produced.
double pairwise_sum(std::span<const double> v);

/// phi(n / sqrt(lambda)), with phi(0) for lambda = +inf.
double cost_term(const ConvexFn& phi, int n, double lambda);

struct CostBreakdown {
  double cost = 0.0;
  std::vector<double> lambdas;  // +inf for empty intervals
  std::vector<double> terms;    // phi(n / sqrt(lambda_j))
};

struct CostOptions {
  double rel_tol = 1e-8;
  int threads = 1;
};

/// F_n = (1/n) sum_j phi(n / lambda(I_j)^(1/2)).
CostBreakdown evaluate_cost(const Partition& P, const CoefficientSet& cs, const ConvexFn& phi,
                            const CostOptions& opt = {});
double cost_Fn(const Partition& P, const CoefficientSet& cs, const ConvexFn& phi,
               double rel_tol = 1e-8);

/// Density 1/(n L(I_j)) on each non-empty interval, atom 1/n at x_j for
/// each empty one.
MeasureRepr empirical_measure(const Partition& P);

/// Mass that the empirical measure gives to the open interval (lo, hi).
/// Cell overlaps are clipped to [0, 1]; an atom counts when lo < x_j < hi.
double portion_count(const Partition& P, double lo, double hi);

/// Mass of a measure on the open interval (lo, hi).
double measure_of(const MeasureRepr& mu, double lo, double hi);

/// W1(mu, nu) = integral over [0, 1] of |F_mu - F_nu|, exact for
/// piecewise-linear CDFs with jumps. Throws ConfigError when the total
/// masses differ by more than 1e-9.
double wasserstein1(const MeasureRepr& mu, const MeasureRepr& nu);

}  // namespace slpart
