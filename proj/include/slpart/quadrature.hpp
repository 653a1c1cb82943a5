#pragma once

#include <functional>
#include <span>

namespace slpart {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;   // subintervals in the final partition
};

struct QuadOptions {
  double abs_tol = 1e-10;
  int max_intervals = 2000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]: the
/// subinterval with the largest error estimate is bisected until the summed
/// estimate falls below `abs_tol`. Throws QuadratureError when the budget of
/// subintervals is exhausted first. Non-finite integrand values propagate
/// into the result rather than throwing.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

/// Same, but the range is split at the given interior `breaks` first (each
/// piece receives a share of the tolerance proportional to its length).
QuadResult integrate_pieces(const std::function<double(double)>& f, double a, double b,
                            std::span<const double> breaks, const QuadOptions& opt = {});

}  // namespace slpart
