#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "slpart/expr.hpp"

namespace slpart {

struct TableCell {
  double lo;
  double hi;
  double value;
};

/// Piecewise-constant function on [0, 1]. Cells are half-open [lo, hi),
/// contiguous and sorted; the last cell is closed at 1.
class PiecewiseTable {
 public:
  /// Throws ConfigError unless the cells tile [0, 1] exactly.
  explicit PiecewiseTable(std::vector<TableCell> cells);

  double operator()(double x) const;
  const std::vector<TableCell>& cells() const noexcept { return cells_; }

  /// Interior knots (cell boundaries other than 0 and 1).
  std::vector<double> knots() const;

 private:
  std::vector<TableCell> cells_;
};

/// One of p, q, w: a closed-form expression or a piecewise-constant table.
class Coefficient {
 public:
  Coefficient(CoeffExpr e) : repr_(std::move(e)) {}  // NOLINT(implicit)
  Coefficient(PiecewiseTable t) : repr_(std::move(t)) {}  // NOLINT(implicit)

  static Coefficient constant(double c);
  static Coefficient expression(std::string_view src);

  /// Evaluates at x in [0, 1]; throws EvalError on a non-finite value or
  /// when x lies outside the unit interval.
  double operator()(double x) const;

  bool is_table() const noexcept { return std::holds_alternative<PiecewiseTable>(repr_); }

  /// Constant on every piece between knots (tables and x-free expressions).
  bool is_piecewise_constant() const noexcept;

  std::vector<double> knots() const;

  /// Expression source or a compact table rendering.
  std::string describe() const;

  const std::variant<CoeffExpr, PiecewiseTable>& repr() const noexcept { return repr_; }

 private:
  std::variant<CoeffExpr, PiecewiseTable> repr_;
};

/// The triple (p, q, w) with its bound constant beta.
struct CoefficientSet {
  Coefficient p;
  Coefficient q;
  Coefficient w;
  double beta;

  /// s(x) = sqrt(w(x) / p(x)).
  double s(double x) const;

  /// Sorted union of table knots of p, q and w.
  std::vector<double> knots() const;

  bool is_piecewise_constant() const noexcept {
    return p.is_piecewise_constant() && q.is_piecewise_constant() && w.is_piecewise_constant();
  }
};

/// Convenience factory for constant coefficients.
CoefficientSet constant_coefficients(double p, double q, double w, double beta);

double eval_coeff(const Coefficient& c, double x);
double s_of(const CoefficientSet& cs, double x);

/// Integral over [a, b] of g(x), where g is built from the coefficients.
/// The range is split at coefficient knots; pieces on which every
/// coefficient is constant are integrated exactly, the rest by adaptive
/// Gauss-Kronrod to absolute tolerance `tol`.
double integrate_coefficients(const CoefficientSet& cs, double a, double b, double tol,
                              const std::function<double(double)>& g);

/// Integral of s over [a, b] to absolute tolerance `tol`.
double integrate_s(const CoefficientSet& cs, double a, double b, double tol = 1e-12);

struct ValidationOptions {
  int samples = 10000;
  bool relax_q = false;  // drop the q >= 0 requirement
};

struct BoundCheck {
  std::string name;     // e.g. "p >= 1/beta"
  bool ok = true;
  double worst_x = 0.0;
  double worst_value = 0.0;
};

struct ValidationReport {
  std::vector<BoundCheck> checks;
  std::vector<std::string> errors;  // evaluation failures and bad beta
  double s_min = 0.0, s_max = 0.0;

  bool ok() const;
  /// Human readable list of every failure, one per line.
  std::string summary() const;
};

/// Checks the standing hypotheses 1/beta <= p, w <= beta, 0 <= q <= beta and
/// 1/beta <= s <= beta on a uniform grid of `samples` points of [0, 1].
ValidationReport validate(const CoefficientSet& cs, const ValidationOptions& opt = {});

}  // namespace slpart
