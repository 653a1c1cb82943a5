#include "slpart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "slpart/errors.hpp"
#include "slpart/parallel.hpp"

namespace slpart {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// CDF of a MeasureRepr evaluated by binary search over prefix masses.
class Cdf {
 public:
  explicit Cdf(const MeasureRepr& mu) : cells_(mu.cells), atoms_(mu.atoms) {
    std::sort(cells_.begin(), cells_.end(),
              [](const DensityCell& a, const DensityCell& b) { return a.lo < b.lo; });
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    cell_prefix_.assign(cells_.size() + 1, 0.0);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      cell_prefix_[i + 1] = cell_prefix_[i] + cells_[i].height * (cells_[i].hi - cells_[i].lo);
    }
    atom_prefix_.assign(atoms_.size() + 1, 0.0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      atom_prefix_[i + 1] = atom_prefix_[i] + atoms_[i].mass;
    }
  }

  double density_mass(double x) const {
    // First cell with lo > x; all earlier cells start at or before x.
    const auto it = std::upper_bound(cells_.begin(), cells_.end(), x,
                                     [](double v, const DensityCell& c) { return v < c.lo; });
    const std::size_t k = static_cast<std::size_t>(it - cells_.begin());
    if (k == 0) return 0.0;
    const DensityCell& c = cells_[k - 1];
    const double partial = c.height * (std::min(x, c.hi) - c.lo);
    return cell_prefix_[k - 1] + partial;
  }

  // F(x) = mu([0, x]).
  double right(double x) const {
    const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                     [](double v, const Atom& a) { return v < a.x; });
    return density_mass(x) + atom_prefix_[static_cast<std::size_t>(it - atoms_.begin())];
  }

  // F(x-) = mu([0, x)).
  double left(double x) const {
    const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                     [](const Atom& a, double v) { return a.x < v; });
    return density_mass(x) + atom_prefix_[static_cast<std::size_t>(it - atoms_.begin())];
  }

  void collect_points(std::vector<double>& out) const {
    for (const auto& c : cells_) {
      out.push_back(c.lo);
      out.push_back(c.hi);
    }
    for (const auto& a : atoms_) out.push_back(a.x);
  }

 private:
  std::vector<DensityCell> cells_;
  std::vector<Atom> atoms_;
  std::vector<double> cell_prefix_;
  std::vector<double> atom_prefix_;
};

// Integral of |d| over an interval of length `width` where d is linear with
// end values d0 and d1.
double abs_linear_integral(double d0, double d1, double width) {
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) {
    return 0.5 * (std::fabs(d0) + std::fabs(d1)) * width;
  }
  const double a = std::fabs(d0), b = std::fabs(d1);
  return 0.5 * width * (a * a + b * b) / (a + b);
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

Partition::Partition(std::vector<double> breakpoints) : x_(std::move(breakpoints)) {
  if (x_.size() < 2) throw ConfigError("a partition needs at least two breakpoints");
  if (x_.front() != 0.0 || x_.back() != 1.0) {
    throw ConfigError(
        fmt::format("breakpoints must start at 0 and end at 1, got {} and {}", x_.front(), x_.back()));
  }
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i])) throw ConfigError(fmt::format("breakpoint {} is not finite", i));
    if (i > 0 && x_[i] < x_[i - 1]) {
      throw ConfigError(fmt::format("breakpoints decrease at index {}: {} < {}", i, x_[i], x_[i - 1]));
    }
  }
}

Partition Partition::uniform(int n) {
  if (n < 1) throw ConfigError(fmt::format("partition size must be >= 1, got {}", n));
  std::vector<double> x(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) x[j] = static_cast<double>(j) / n;
  x[n] = 1.0;
  return Partition(std::move(x));
}

double Partition::min_length() const {
  double best = kInf;
  for (std::size_t i = 1; i < x_.size(); ++i) best = std::min(best, x_[i] - x_[i - 1]);
  return best;
}

double MeasureRepr::total_mass() const {
  std::vector<double> parts;
  parts.reserve(cells.size() + atoms.size());
  for (const auto& c : cells) parts.push_back(c.height * (c.hi - c.lo));
  for (const auto& a : atoms) parts.push_back(a.mass);
  return pairwise_sum(parts);
}

void MeasureRepr::validate(double tol) const {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (!(c.lo >= 0.0 && c.hi <= 1.0 && c.lo <= c.hi)) {
      throw ConfigError(fmt::format("cell {} = ({}, {}) is not inside [0, 1]", i, c.lo, c.hi));
    }
    if (!(c.height >= 0.0 && std::isfinite(c.height))) {
      throw ConfigError(fmt::format("cell {} has invalid height {}", i, c.height));
    }
    if (i > 0 && c.lo < cells[i - 1].hi) {
      throw ConfigError(fmt::format("cells {} and {} overlap or are unsorted", i - 1, i));
    }
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (!(a.x >= 0.0 && a.x <= 1.0)) throw ConfigError(fmt::format("atom {} at {} is outside [0, 1]", i, a.x));
    if (!(a.mass > 0.0 && std::isfinite(a.mass))) {
      throw ConfigError(fmt::format("atom {} has invalid mass {}", i, a.mass));
    }
  }
  const double mass = total_mass();
  if (!(std::fabs(mass - 1.0) <= tol)) {
    throw ConfigError(fmt::format("total mass is {:.17g}, expected 1", mass));
  }
}

double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double cost_term(const ConvexFn& phi, int n, double lambda) {
  if (std::isinf(lambda) && lambda > 0.0) return phi(0.0);
  if (!(lambda > 0.0)) {
    throw SolverError(fmt::format("non-positive eigenvalue {} has no cost term", lambda));
  }
  return phi(static_cast<double>(n) / std::sqrt(lambda));
}

CostBreakdown evaluate_cost(const Partition& P, const CoefficientSet& cs, const ConvexFn& phi,
                            const CostOptions& opt) {
  const int n = P.n();
  CostBreakdown out;
  out.lambdas.assign(n, kInf);
  out.terms.assign(n, 0.0);
  parallel_for(static_cast<std::size_t>(n), opt.threads, [&](std::size_t i) {
    const Interval J = P.interval(static_cast<int>(i) + 1);
    if (!J.empty()) out.lambdas[i] = first_eigenvalue(J, cs, opt.rel_tol).lambda;
    out.terms[i] = cost_term(phi, n, out.lambdas[i]);
  });
  out.cost = pairwise_sum(out.terms) / n;
  return out;
}

double cost_Fn(const Partition& P, const CoefficientSet& cs, const ConvexFn& phi, double rel_tol) {
  return evaluate_cost(P, cs, phi, CostOptions{rel_tol, 1}).cost;
}

MeasureRepr empirical_measure(const Partition& P) {
  const int n = P.n();
  MeasureRepr mu;
  for (int j = 1; j <= n; ++j) {
    const Interval I = P.interval(j);
    if (I.empty()) {
      mu.atoms.push_back({I.hi, 1.0 / n});
    } else {
      mu.cells.push_back({I.lo, I.hi, 1.0 / (n * I.length())});
    }
  }
  return mu;
}

double portion_count(const Partition& P, double lo, double hi) {
  const int n = P.n();
  const double a = clip01(lo), b = clip01(hi);
  std::vector<double> parts;
  parts.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    const Interval I = P.interval(j);
    if (I.empty()) {
      if (lo < I.hi && I.hi < hi) parts.push_back(1.0 / n);
      continue;
    }
    const double overlap = std::min(I.hi, b) - std::max(I.lo, a);
    if (overlap > 0.0) parts.push_back(overlap / (n * I.length()));
  }
  return pairwise_sum(parts);
}

double measure_of(const MeasureRepr& mu, double lo, double hi) {
  const double a = clip01(lo), b = clip01(hi);
  std::vector<double> parts;
  for (const auto& c : mu.cells) {
    const double overlap = std::min(c.hi, b) - std::max(c.lo, a);
    if (overlap > 0.0) parts.push_back(c.height * overlap);
  }
  for (const auto& at : mu.atoms) {
    if (lo < at.x && at.x < hi) parts.push_back(at.mass);
  }
  return pairwise_sum(parts);
}

double wasserstein1(const MeasureRepr& mu, const MeasureRepr& nu) {
  const double m1 = mu.total_mass(), m2 = nu.total_mass();
  if (!(std::fabs(m1 - m2) <= 1e-9)) {
    throw ConfigError(fmt::format("measures have different masses {:.17g} and {:.17g}", m1, m2));
  }
  const Cdf F(mu), G(nu);
  std::vector<double> pts{0.0, 1.0};
  F.collect_points(pts);
  G.collect_points(pts);
  for (double& t : pts) t = clip01(t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  std::vector<double> parts;
  parts.reserve(pts.size());
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double t0 = pts[k], t1 = pts[k + 1];
    const double d0 = F.right(t0) - G.right(t0);
    const double d1 = F.left(t1) - G.left(t1);
    parts.push_back(abs_linear_integral(d0, d1, t1 - t0));
  }
  return pairwise_sum(parts);
}

}  // namespace slpart
