#pragma once

#include <utility>
#include <vector>

#include "slpart/coefficients.hpp"

namespace slpart {

/// Open subinterval (lo, hi) of the unit interval.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  /// Lengths below this are treated as the empty set.
  static constexpr double kEmptyLength = 1e-12;

  double length() const noexcept { return hi - lo; }
  bool empty() const noexcept { return length() < kEmptyLength; }
};

struct EigenResult {
  double lambda = 0.0;          // +inf for an empty interval
  double error_estimate = 0.0;  // last change of the extrapolated value
  int grid_size = 0;            // interior nodes of the finest grid, 0 if exact
  std::vector<std::pair<double, double>> eigenfunction;  // (x, u(x)), max u = 1

  bool is_infinite() const noexcept;
};

struct SolverOptions {
  double rel_tol = 1e-8;
  /// Interior nodes of the coarsest grid; 0 selects 32. The first mode
  /// spans the whole interval, so the count does not depend on its length.
  int initial_nodes = 0;
  /// Number of grid doublings allowed before giving up.
  int max_levels = 16;
  bool want_eigenfunction = false;
  /// Return the exact value pi^2 p / (w L^2) + q / w when p, q and w are all
  /// constant on J, skipping the finite-difference solve.
  bool closed_form = true;
};

/// First Dirichlet eigenvalue of -(p u')' + q u = lambda w u on J.
///
/// Self-adjoint second-order finite differences on uniform grids of
/// N = m + 1 cells: interface stiffness is the harmonic mean of p over each
/// cell, and the lumped mass and potential at a node are w and q at that
/// node (exact hat-weighted means when the coefficient is a table). The
/// smallest eigenvalue of the symmetric tridiagonal pencil is located by
/// bisection on the Sturm sign count. The grid is doubled and each pair of
/// levels Richardson-extrapolated (h^2 elimination) until two successive
/// extrapolated values differ by less than rel_tol * |lambda|.
///
/// When every coefficient is constant on J the closed form is returned
/// instead (unless opt.closed_form is false).
///
/// Throws SolverError when the refinement budget runs out.
EigenResult first_eigenvalue(const Interval& J, const CoefficientSet& cs, const SolverOptions& opt);
EigenResult first_eigenvalue(const Interval& J, const CoefficientSet& cs, double rel_tol = 1e-8);

/// Smallest eigenvalue of the discrete pencil on one fixed grid of m interior
/// nodes, without extrapolation. Used as a brute-force reference.
double discrete_eigenvalue(const Interval& J, const CoefficientSet& cs, int interior_nodes);

/// pi^2 p / (w L^2) + q / w, the minimum of the Rayleigh quotient for
/// constant coefficients (the q term is weighted by 1/w like the rest).
double closed_form_eigenvalue(const Interval& J, double p, double q, double w);

struct Bounds {
  double lo;
  double hi;
};

/// pi^2 / (beta^2 L^2) <= lambda(J) <= beta^2 pi^2 / L^2 + beta^2.
Bounds global_bounds(const Interval& J, double beta);

/// Upper bound obtained by testing the quotient with the Laplacian
/// eigenfunction after the w-weighted change of variables.
double local_upper_bound(const Interval& J, const CoefficientSet& cs, double tol = 1e-13);

/// Lower bound from the 1/p-weighted change of variables and Poincare.
double local_lower_bound(const Interval& J, const CoefficientSet& cs, double tol = 1e-13);

struct ShrinkRow {
  double radius;
  double scaled_lambda;  // lambda(J) * L(J)^2
  double error_estimate;  // of lambda(J), scaled by L^2
};

/// lambda(J) L(J)^2 on J = (x0 - r, x0 + r) for each radius.
std::vector<ShrinkRow> shrinkage_limit_check(double x0, const CoefficientSet& cs,
                                             const std::vector<double>& radii,
                                             double rel_tol = 1e-10);

}  // namespace slpart
