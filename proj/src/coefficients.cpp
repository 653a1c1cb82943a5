#include "slpart/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "slpart/errors.hpp"
#include "slpart/quadrature.hpp"

namespace slpart {

PiecewiseTable::PiecewiseTable(std::vector<TableCell> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) throw ConfigError("piecewise table has no cells");
  std::sort(cells_.begin(), cells_.end(),
            [](const TableCell& a, const TableCell& b) { return a.lo < b.lo; });
  constexpr double kSnap = 1e-12;
  if (std::abs(cells_.front().lo) > kSnap) throw ConfigError("piecewise table must start at 0");
  if (std::abs(cells_.back().hi - 1.0) > kSnap) throw ConfigError("piecewise table must end at 1");
  cells_.front().lo = 0.0;
  cells_.back().hi = 1.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    auto& c = cells_[i];
    if (!std::isfinite(c.value)) throw ConfigError("piecewise table value is not finite");
    if (i > 0) {
      if (std::abs(c.lo - cells_[i - 1].hi) > kSnap) {
        throw ConfigError(fmt::format("piecewise table has a gap or overlap at {}", c.lo));
      }
      c.lo = cells_[i - 1].hi;
    }
    if (!(c.hi > c.lo)) throw ConfigError(fmt::format("empty table cell at {}", c.lo));
  }
}

double PiecewiseTable::operator()(double x) const {
  auto it = std::upper_bound(cells_.begin(), cells_.end(), x,
                             [](double v, const TableCell& c) { return v < c.lo; });
  if (it == cells_.begin()) return cells_.front().value;
  --it;
  return it->value;
}

std::vector<double> PiecewiseTable::knots() const {
  std::vector<double> k;
  for (std::size_t i = 1; i < cells_.size(); ++i) k.push_back(cells_[i].lo);
  return k;
}

Coefficient Coefficient::constant(double c) {
  return Coefficient(parse_expr(fmt::format("{:.17g}", c)));
}

Coefficient Coefficient::expression(std::string_view src) { return Coefficient(parse_expr(src)); }

double Coefficient::operator()(double x) const {
  constexpr double kSlack = 1e-12;
  if (!(x >= -kSlack && x <= 1.0 + kSlack)) throw EvalError("coefficient evaluated outside [0,1]", x);
  const double v = std::visit([x](const auto& r) { return r(x); }, repr_);
  if (!std::isfinite(v)) throw EvalError("coefficient is not finite", x);
  return v;
}

bool Coefficient::is_piecewise_constant() const noexcept {
  if (const auto* e = std::get_if<CoeffExpr>(&repr_)) return e->is_constant();
  return true;
}

std::vector<double> Coefficient::knots() const {
  if (const auto* t = std::get_if<PiecewiseTable>(&repr_)) return t->knots();
  return {};
}

std::string Coefficient::describe() const {
  if (const auto* e = std::get_if<CoeffExpr>(&repr_)) return e->source();
  const auto& t = std::get<PiecewiseTable>(repr_);
  std::string out = "cells[";
  for (std::size_t i = 0; i < t.cells().size(); ++i) {
    const auto& c = t.cells()[i];
    out += fmt::format("{}({:g},{:g})->{:g}", i ? " " : "", c.lo, c.hi, c.value);
  }
  return out + "]";
}

double CoefficientSet::s(double x) const { return std::sqrt(w(x) / p(x)); }

std::vector<double> CoefficientSet::knots() const {
  std::vector<double> k;
  for (const Coefficient* c : {&p, &q, &w}) {
    auto ck = c->knots();
    k.insert(k.end(), ck.begin(), ck.end());
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

CoefficientSet constant_coefficients(double p, double q, double w, double beta) {
  return {Coefficient::constant(p), Coefficient::constant(q), Coefficient::constant(w), beta};
}

double eval_coeff(const Coefficient& c, double x) { return c(x); }

double s_of(const CoefficientSet& cs, double x) { return cs.s(x); }

double integrate_coefficients(const CoefficientSet& cs, double a, double b, double tol,
                              const std::function<double(double)>& g) {
  if (!(a <= b)) throw QuadratureError(fmt::format("invalid range [{}, {}]", a, b));
  if (a == b) return 0.0;
  const auto knots = cs.knots();
  if (cs.is_piecewise_constant()) {
    double sum = 0.0;
    double lo = a;
    for (double k : knots) {
      if (k <= a || k >= b) continue;
      sum += g(0.5 * (lo + k)) * (k - lo);
      lo = k;
    }
    return sum + g(0.5 * (lo + b)) * (b - lo);
  }
  QuadOptions opt;
  opt.abs_tol = tol;
  opt.max_intervals = 4000;
  return integrate_pieces(g, a, b, knots, opt).value;
}

double integrate_s(const CoefficientSet& cs, double a, double b, double tol) {
  if (!(0.0 <= a && a <= b && b <= 1.0)) {
    throw QuadratureError(fmt::format("integrate_s needs 0 <= a <= b <= 1, got [{}, {}]", a, b));
  }
  return integrate_coefficients(cs, a, b, tol, [&](double x) { return cs.s(x); });
}

bool ValidationReport::ok() const {
  return errors.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.ok; });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& e : errors) out += e + "\n";
  for (const auto& c : checks) {
    if (!c.ok) {
      out += fmt::format("violated {}: value {:.17g} at x={:.17g}\n", c.name, c.worst_value,
                         c.worst_x);
    }
  }
  return out;
}

ValidationReport validate(const CoefficientSet& cs, const ValidationOptions& opt) {
  ValidationReport rep;
  const double beta = cs.beta;
  if (!(std::isfinite(beta) && beta > 1.0)) {
    rep.errors.push_back(fmt::format("beta must be a finite number > 1, got {}", beta));
    return rep;
  }
  const int n = std::max(opt.samples, 2);

  struct Extent {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    double x_min = 0.0, x_max = 0.0;
    void add(double x, double v) {
      if (v < min) { min = v; x_min = x; }
      if (v > max) { max = v; x_max = x; }
    }
  };
  Extent ep, eq, ew, es;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    try {
      const double pv = cs.p(x), qv = cs.q(x), wv = cs.w(x);
      ep.add(x, pv);
      eq.add(x, qv);
      ew.add(x, wv);
      if (pv > 0 && wv >= 0) es.add(x, std::sqrt(wv / pv));
    } catch (const EvalError& e) {
      rep.errors.push_back(e.what());
      return rep;
    }
  }

  // Bounds are inclusive; the slack only absorbs the rounding of 1/beta.
  const double slack = 1e-12 * beta;
  auto lower = [&](std::string name, const Extent& e, double bound) {
    rep.checks.push_back({std::move(name), e.min >= bound - slack, e.x_min, e.min});
  };
  auto upper = [&](std::string name, const Extent& e, double bound) {
    rep.checks.push_back({std::move(name), e.max <= bound + slack, e.x_max, e.max});
  };
  lower("p >= 1/beta", ep, 1.0 / beta);
  upper("p <= beta", ep, beta);
  lower("w >= 1/beta", ew, 1.0 / beta);
  upper("w <= beta", ew, beta);
  if (!opt.relax_q) lower("q >= 0", eq, 0.0);
  upper("q <= beta", eq, beta);
  if (es.max >= es.min) {
    lower("s >= 1/beta", es, 1.0 / beta);
    upper("s <= beta", es, beta);
    rep.s_min = es.min;
    rep.s_max = es.max;
  }
  return rep;
}

}  // namespace slpart
