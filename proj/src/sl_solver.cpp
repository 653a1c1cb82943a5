#include "slpart/sl_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include <fmt/format.h>

#include "slpart/errors.hpp"

namespace slpart {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Mean of g(table value) over each [edges[k], edges[k+1]]; edges sorted.
template <typename G>
void table_means(const PiecewiseTable& t, std::span<const double> edges, G g,
                 std::vector<double>& out) {
  const auto& cells = t.cells();
  out.resize(edges.size() - 1);
  std::size_t c = 0;
  while (c + 1 < cells.size() && cells[c].hi <= edges[0]) ++c;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    while (c + 1 < cells.size() && cells[c].hi <= a) ++c;
    double sum = 0.0;
    std::size_t j = c;
    double lo = a;
    while (true) {
      const double hi = (j + 1 < cells.size()) ? std::min(b, cells[j].hi) : b;
      if (hi > lo) sum += g(cells[j].value) * (hi - lo);
      if (hi >= b || j + 1 >= cells.size()) break;
      lo = hi;
      ++j;
    }
    out[k] = sum / (b - a);
  }
}

/// Hat-function weighted means: out[i] = (1/h) * integral of t * phi_{i+1},
/// phi_{i+1} the piecewise-linear hat peaking at nodes[i + 1].
void table_hat_means(const PiecewiseTable& t, std::span<const double> nodes,
                     std::vector<double>& out) {
  const auto& cells = t.cells();
  const std::size_t n_cells = nodes.size() - 1;
  // Per grid cell k: integrals of t * (x - x_k) / h and t * (x_{k+1} - x) / h.
  std::vector<double> rising(n_cells), falling(n_cells);
  std::size_t c = 0;
  for (std::size_t k = 0; k < n_cells; ++k) {
    const double a = nodes[k], b = nodes[k + 1], h = b - a;
    while (c + 1 < cells.size() && cells[c].hi <= a) ++c;
    double up = 0.0, down = 0.0, lo = a;
    for (std::size_t j = c;; ++j) {
      const double hi = (j + 1 < cells.size()) ? std::min(b, cells[j].hi) : b;
      if (hi > lo) {
        // integral of (x - a)/h and (b - x)/h over [lo, hi]
        const double s1 = ((hi - a) * (hi - a) - (lo - a) * (lo - a)) / (2.0 * h);
        up += cells[j].value * s1;
        down += cells[j].value * ((hi - lo) - s1);
      }
      if (hi >= b || j + 1 >= cells.size()) break;
      lo = hi;
    }
    rising[k] = up;
    falling[k] = down;
  }
  out.resize(n_cells - 1);
  for (std::size_t i = 0; i + 1 < n_cells; ++i) {
    const double h = 0.5 * (nodes[i + 2] - nodes[i]);
    out[i] = (rising[i] + falling[i + 1]) / h;
  }
}

/// Scaled pencil h^2 K - sigma M for one grid, kept in factored form. h is
/// the reference spacing L / cells; on a non-uniform grid the entries are
/// the lumped finite-element ones rescaled so that a uniform grid gives
/// a = p, hq = h^2 q and mass = w. Node i (0-based) sits at x[i + 1] with
/// stiffness a[i] to its left and a[i + 1] to its right.
struct Pencil {
  int cells = 0;
  double h = 0.0;
  std::vector<double> x;  // cells + 1 grid points including both ends
  std::vector<double> a, hq, mass;

  int nodes() const { return static_cast<int>(mass.size()); }
  double diag(int i) const { return a[i] + a[i + 1] + hq[i]; }
  double off(int i) const { return -a[i + 1]; }
};

std::vector<double> uniform_grid(const Interval& J, int cells) {
  std::vector<double> x(cells + 1);
  for (int i = 0; i <= cells; ++i) x[i] = J.lo + J.length() * (static_cast<double>(i) / cells);
  x[cells] = J.hi;
  return x;
}

/// Grid that is uniform on each piece between consecutive edges.
std::vector<double> piecewise_grid(std::span<const double> edges, std::span<const int> counts) {
  std::vector<double> x{edges[0]};
  for (std::size_t p = 0; p < counts.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    for (int i = 1; i < counts[p]; ++i) x.push_back(a + (b - a) * (static_cast<double>(i) / counts[p]));
    x.push_back(b);
  }
  return x;
}

Pencil assemble(const Interval& J, const CoefficientSet& cs, std::vector<double> grid) {
  Pencil pen;
  const int cells = static_cast<int>(grid.size()) - 1;
  pen.cells = cells;
  pen.h = J.length() / cells;
  const int m = cells - 1;
  const double h = pen.h;
  pen.x = std::move(grid);
  const auto& nodes = pen.x;

  // Interface stiffness over each cell [x_i, x_{i+1}].
  pen.a.resize(cells);
  if (const auto* t = std::get_if<PiecewiseTable>(&cs.p.repr())) {
    std::vector<double> inv;
    table_means(*t, nodes, [](double v) { return 1.0 / v; }, inv);
    for (int i = 0; i < cells; ++i) pen.a[i] = h / (inv[i] * (nodes[i + 1] - nodes[i]));
  } else {
    std::vector<double> pv(cells + 1);
    for (int i = 0; i <= cells; ++i) pv[i] = cs.p(nodes[i]);
    for (int i = 0; i < cells; ++i) {
      pen.a[i] = 2.0 * pv[i] * pv[i + 1] / (pv[i] + pv[i + 1]) * (h / (nodes[i + 1] - nodes[i]));
    }
  }

  // Nodal values of q and w; tables use hat-weighted means.
  auto nodal = [&](const Coefficient& c, std::vector<double>& out) {
    if (const auto* t = std::get_if<PiecewiseTable>(&c.repr())) {
      table_hat_means(*t, nodes, out);
    } else {
      out.resize(m);
      for (int i = 0; i < m; ++i) out[i] = c(nodes[i + 1]);
    }
    for (int i = 0; i < m; ++i) out[i] *= (nodes[i + 2] - nodes[i]) / (2.0 * h);
  };
  nodal(cs.q, pen.hq);
  for (double& v : pen.hq) v *= h * h;
  nodal(cs.w, pen.mass);
  return pen;
}

/// True when the pencil has at least one eigenvalue strictly below sigma,
/// i.e. some pivot d_i of the LDL^T factorisation is negative. The pivots
/// are carried as excesses t_i = d_i - a[i + 1], which avoids cancelling
/// O(1) stiffness terms against O(h^2) shifts on fine grids.
bool has_eigenvalue_below(const Pencil& pen, double sigma) {
  const int m = pen.nodes();
  double t = pen.a[0] + pen.hq[0] - sigma * pen.mass[0];
  if (t < -pen.a[1]) return true;
  for (int i = 1; i < m; ++i) {
    double d = pen.a[i] + t;  // previous pivot
    if (d < 1e-300) d = 1e-300;
    t = pen.a[i] * t / d + pen.hq[i] - sigma * pen.mass[i];
    if (t < -pen.a[i + 1]) return true;
  }
  return false;
}

/// Lower bound on every eigenvalue: the stiffness part is positive
/// semidefinite, so min(h^2 q / w) bounds the pencil from below.
double potential_lower(const Pencil& pen) {
  double lo = 0.0;
  for (int i = 0; i < pen.nodes(); ++i) lo = std::min(lo, pen.hq[i] / pen.mass[i]);
  return lo;
}

double sine_at(const Pencil& pen, int i) {
  const double L = pen.x.back() - pen.x.front();
  return std::sin(std::numbers::pi * (pen.x[i + 1] - pen.x.front()) / L);
}

/// Rayleigh quotient of the discrete sine mode, an upper bound on the
/// smallest eigenvalue.
double sine_rayleigh(const Pencil& pen) {
  const int m = pen.nodes();
  double num = 0.0, den = 0.0, prev = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double v = i < m ? sine_at(pen, i) : 0.0;
    num += pen.a[i] * (v - prev) * (v - prev);
    if (i < m) {
      num += pen.hq[i] * v * v;
      den += pen.mass[i] * v * v;
    }
    prev = v;
  }
  return num / den;
}

struct Bracket {
  double lo, hi;
};

Bracket bisect(const Pencil& pen, Bracket b, double rel_width) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid <= b.lo || mid >= b.hi) break;
    if (b.hi - b.lo <= rel_width * std::max(std::abs(b.lo), std::abs(b.hi))) break;
    if (has_eigenvalue_below(pen, mid)) {
      b.hi = mid;
    } else {
      b.lo = mid;
    }
  }
  return b;
}

Bracket safe_bracket(const Pencil& pen) {
  const double g = potential_lower(pen);
  const double r = sine_rayleigh(pen);
  double lo = g - 1e-12 * std::abs(g) - 1e-300;
  double hi = r + 1e-12 * std::abs(r) + 1e-300;
  while (!has_eigenvalue_below(pen, hi)) hi += std::max(std::abs(hi), 1e-12);
  while (has_eigenvalue_below(pen, lo)) lo -= std::max(std::abs(lo), 1e-12);
  return {lo, hi};
}

/// Bracket around a predicted (scaled) eigenvalue, widened until valid.
Bracket guided_bracket(const Pencil& pen, double predicted, double rel_width) {
  double delta = std::max(rel_width, 1e-9) * std::abs(predicted);
  if (!(delta > 0) || !std::isfinite(delta)) return safe_bracket(pen);
  for (int tries = 0; tries < 12; ++tries, delta *= 4.0) {
    const Bracket b{predicted - delta, predicted + delta};
    if (!has_eigenvalue_below(pen, b.lo) && has_eigenvalue_below(pen, b.hi)) return b;
  }
  return safe_bracket(pen);
}

/// Normalised eigenvector by inverse iteration with a shift from below.
std::vector<double> inverse_iteration(const Pencil& pen, double shift) {
  const int m = pen.nodes();
  std::vector<double> v(m), rhs(m), cprime(m), dprime(m);
  for (int i = 0; i < m; ++i) v[i] = sine_at(pen, i);
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int i = 0; i < m; ++i) rhs[i] = pen.mass[i] * v[i];
    // Thomas algorithm on (h^2 K - shift M), positive definite for shift < lambda_1.
    double denom = pen.diag(0) - shift * pen.mass[0];
    cprime[0] = m > 1 ? pen.off(0) / denom : 0.0;
    dprime[0] = rhs[0] / denom;
    for (int i = 1; i < m; ++i) {
      denom = pen.diag(i) - shift * pen.mass[i] - pen.off(i - 1) * cprime[i - 1];
      cprime[i] = i + 1 < m ? pen.off(i) / denom : 0.0;
      dprime[i] = (rhs[i] - pen.off(i - 1) * dprime[i - 1]) / denom;
    }
    v[m - 1] = dprime[m - 1];
    for (int i = m - 2; i >= 0; --i) v[i] = dprime[i] - cprime[i] * v[i + 1];
    double peak = 0.0;
    for (double x : v) peak = std::abs(x) > std::abs(peak) ? x : peak;
    for (double& x : v) x /= peak;
  }
  return v;
}

constexpr int kDefaultInitialNodes = 32;

// True when p, q and w are all constant on J: piecewise constant with no
// knot strictly inside.
bool constant_on(const Interval& J, const CoefficientSet& cs) {
  if (!cs.is_piecewise_constant()) return false;
  for (double k : cs.knots()) {
    if (k > J.lo && k < J.hi) return false;
  }
  return true;
}

}  // namespace

bool EigenResult::is_infinite() const noexcept { return std::isinf(lambda); }

EigenResult first_eigenvalue(const Interval& J, const CoefficientSet& cs,
                             const SolverOptions& opt) {
  if (!(opt.rel_tol > 0.0 && opt.rel_tol < 1.0)) {
    throw SolverError(fmt::format("rel_tol must lie in (0, 1), got {}", opt.rel_tol));
  }
  if (!(J.lo >= 0.0 && J.hi <= 1.0 && J.lo <= J.hi)) {
    throw SolverError(fmt::format("interval ({}, {}) is not inside [0, 1]", J.lo, J.hi));
  }
  EigenResult res;
  if (J.empty()) {
    res.lambda = kInf;
    return res;
  }
  if (opt.closed_form && constant_on(J, cs)) {
    const double mid = 0.5 * (J.lo + J.hi);
    res.lambda = closed_form_eigenvalue(J, cs.p(mid), cs.q(mid), cs.w(mid));
    if (opt.want_eigenfunction) {
      constexpr int kSamples = 65;
      for (int i = 0; i < kSamples; ++i) {
        const double t = static_cast<double>(i) / (kSamples - 1);
        res.eigenfunction.emplace_back(J.lo + t * J.length(),
                                       i == 0 || i == kSamples - 1 ? 0.0 : std::sin(std::numbers::pi * t));
      }
    }
    return res;
  }

  const int m0 = opt.initial_nodes > 0 ? opt.initial_nodes : kDefaultInitialNodes;
  const double bisect_width = std::max(1e-4 * opt.rel_tol, 1e-14);

  // Table knots inside J become grid points, so every cell sees constant
  // table values and the h^2 error expansion is not spoiled by where a
  // jump falls between nodes. Knots hugging an end or each other are left
  // to the cell averages.
  const double L = J.length();
  std::vector<double> edges{J.lo};
  for (double k : cs.knots()) {
    if (k - edges.back() > 1e-6 * L && J.hi - k > 1e-6 * L) edges.push_back(k);
  }
  edges.push_back(J.hi);
  std::vector<int> counts(edges.size() - 1);
  for (std::size_t p = 0; p < counts.size(); ++p) {
    counts[p] = std::max(1, static_cast<int>(std::lround((m0 + 1) * (edges[p + 1] - edges[p]) / L)));
  }

  std::vector<double> levels;     // raw grid eigenvalues
  std::vector<double> extrap;     // Richardson values, extrap[k] from levels k, k+1
  Pencil pen;
  Bracket last{};
  for (int level = 0; level <= opt.max_levels; ++level) {
    pen = assemble(J, cs, piecewise_grid(edges, counts));
    for (int& c : counts) c *= 2;
    const double h2 = pen.h * pen.h;
    Bracket b;
    if (levels.empty()) {
      b = safe_bracket(pen);
    } else {
      double predicted = levels.back();
      double spread = 0.05;
      if (levels.size() >= 2) {
        const double diff = levels.back() - levels[levels.size() - 2];
        predicted += diff / 4.0;
        spread = 2.0 * std::abs(diff) / std::max(std::abs(levels.back()), 1e-300);
      }
      b = guided_bracket(pen, predicted * h2, spread);
    }
    last = bisect(pen, b, bisect_width);
    levels.push_back(0.5 * (last.lo + last.hi) / h2);

    if (levels.size() >= 2) {
      const std::size_t k = levels.size() - 1;
      extrap.push_back((4.0 * levels[k] - levels[k - 1]) / 3.0);
    }
    if (extrap.size() >= 2) {
      const double cur = extrap.back();
      const double change = std::abs(cur - extrap[extrap.size() - 2]);
      if (change <= opt.rel_tol * std::abs(cur)) {
        res.lambda = cur;
        res.error_estimate = change;
        res.grid_size = pen.nodes();
        break;
      }
    }
  }
  if (res.grid_size == 0) {
    throw SolverError(fmt::format(
        "first eigenvalue on ({}, {}) did not reach rel_tol {} within {} grid doublings",
        J.lo, J.hi, opt.rel_tol, opt.max_levels));
  }

  if (opt.want_eigenfunction) {
    const auto v = inverse_iteration(pen, last.lo);
    res.eigenfunction.reserve(v.size() + 2);
    res.eigenfunction.emplace_back(J.lo, 0.0);
    for (int i = 0; i < pen.nodes(); ++i) {
      res.eigenfunction.emplace_back(pen.x[i + 1], v[i]);
    }
    res.eigenfunction.emplace_back(J.hi, 0.0);
  }
  return res;
}

EigenResult first_eigenvalue(const Interval& J, const CoefficientSet& cs, double rel_tol) {
  SolverOptions opt;
  opt.rel_tol = rel_tol;
  return first_eigenvalue(J, cs, opt);
}

double discrete_eigenvalue(const Interval& J, const CoefficientSet& cs, int interior_nodes) {
  if (J.empty()) return kInf;
  if (interior_nodes < 1) throw SolverError("need at least one interior node");
  const Pencil pen = assemble(J, cs, uniform_grid(J, interior_nodes + 1));
  const Bracket b = bisect(pen, safe_bracket(pen), 1e-15);
  return 0.5 * (b.lo + b.hi) / (pen.h * pen.h);
}

double closed_form_eigenvalue(const Interval& J, double p, double q, double w) {
  if (J.empty()) throw SolverError("closed form needs a non-empty interval");
  const double L = J.length();
  return (kPi2 * p / (L * L) + q) / w;
}

Bounds global_bounds(const Interval& J, double beta) {
  if (J.empty()) throw SolverError("global bounds need a non-empty interval");
  const double L2 = J.length() * J.length();
  const double b2 = beta * beta;
  return {kPi2 / (b2 * L2), b2 * kPi2 / L2 + b2};
}

double local_upper_bound(const Interval& J, const CoefficientSet& cs, double tol) {
  if (J.empty()) throw SolverError("local bounds need a non-empty interval");
  const double L = J.length();
  auto mean = [&](auto&& g) { return integrate_coefficients(cs, J.lo, J.hi, tol, g) / L; };
  const double mw = mean([&](double x) { return cs.w(x); });
  const double mpw2 = mean([&](double x) {
    const double w = cs.w(x);
    return cs.p(x) * w * w;
  });
  const double ratio = mpw2 / mw;
  const double dev = mean([&](double x) {
    const double w = cs.w(x);
    return std::abs(cs.p(x) * w * w - ratio * w);
  });
  return kPi2 / (L * L) / (mw * mw * mw) * (mpw2 + 2.0 * dev) + cs.beta * cs.beta;
}

double local_lower_bound(const Interval& J, const CoefficientSet& cs, double tol) {
  if (J.empty()) throw SolverError("local bounds need a non-empty interval");
  const double L = J.length();
  auto mean = [&](auto&& g) { return integrate_coefficients(cs, J.lo, J.hi, tol, g) / L; };
  const double minv = mean([&](double x) { return 1.0 / cs.p(x); });
  const double mw = mean([&](double x) { return cs.w(x); });
  const double ratio = mw / minv;
  const double dev = mean([&](double x) { return std::abs(cs.w(x) - ratio / cs.p(x)); });
  return kPi2 / (minv * (mw + kPi2 * dev) * L * L);
}

std::vector<ShrinkRow> shrinkage_limit_check(double x0, const CoefficientSet& cs,
                                             const std::vector<double>& radii, double rel_tol) {
  if (!(x0 > 0.0 && x0 < 1.0)) throw SolverError("x0 must lie in (0, 1)");
  std::vector<ShrinkRow> rows;
  rows.reserve(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (!(r > 0.0) || x0 - r < 0.0 || x0 + r > 1.0) {
      throw SolverError(fmt::format("radius {} does not fit inside (0, 1) around {}", r, x0));
    }
    if (i > 0 && !(r < radii[i - 1])) throw SolverError("radii must be decreasing");
    const Interval J{x0 - r, x0 + r};
    const auto e = first_eigenvalue(J, cs, rel_tol);
    const double L2 = J.length() * J.length();
    rows.push_back({r, e.lambda * L2, e.error_estimate * L2});
  }
  return rows;
}

}  // namespace slpart
