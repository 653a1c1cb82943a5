#include "slpart/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "slpart/errors.hpp"
#include "slpart/parallel.hpp"

namespace slpart {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> merged_knots(const CoefficientSet& cs) {
  std::vector<double> pts{0.0, 1.0};
  for (double k : cs.p.knots()) pts.push_back(k);
  for (double k : cs.w.knots()) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Snaps values within 1e-9 of an integer, so that alpha * n / m computed
// in floating point does not lose a whole interval to rounding.
double snapped_floor(double v) {
  const double r = std::round(v);
  return std::fabs(v - r) <= 1e-9 * std::max(1.0, std::fabs(v)) ? r : std::floor(v);
}
}  // namespace

void PiecewiseConstMeasure::validate() const {
  if (m < 1) throw ConfigError(fmt::format("block count must be >= 1, got {}", m));
  if (static_cast<int>(alphas.size()) != m) {
    throw ConfigError(fmt::format("expected {} heights, got {}", m, alphas.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 0.0 && std::isfinite(alphas[i]))) {
      throw ConfigError(fmt::format("alpha_{} = {} must be finite and >= 0", i + 1, alphas[i]));
    }
    sum += alphas[i];
  }
  if (!(std::fabs(sum - m) <= 1e-9 * m)) {
    throw ConfigError(fmt::format("heights sum to {:.17g}, expected m = {}", sum, m));
  }
}

int PiecewiseConstMeasure::zero_blocks() const {
  return static_cast<int>(std::count(alphas.begin(), alphas.end(), 0.0));
}

MeasureRepr PiecewiseConstMeasure::to_measure() const {
  validate();
  MeasureRepr mu;
  for (int i = 0; i < m; ++i) {
    if (alphas[i] > 0.0) {
      mu.cells.push_back({static_cast<double>(i) / m, static_cast<double>(i + 1) / m, alphas[i]});
    }
  }
  return mu;
}

MeasureRepr f_infinity(const CoefficientSet& cs, int grid) {
  if (grid < 1) throw ConfigError(fmt::format("grid must be >= 1, got {}", grid));
  std::vector<double> edges;
  std::vector<double> mass;
  if (cs.p.is_piecewise_constant() && cs.w.is_piecewise_constant()) {
    edges = merged_knots(cs);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double mid = 0.5 * (edges[i] + edges[i + 1]);
      mass.push_back(cs.s(mid) * (edges[i + 1] - edges[i]));
    }
  } else {
    edges.resize(static_cast<std::size_t>(grid) + 1);
    for (int i = 0; i <= grid; ++i) edges[i] = static_cast<double>(i) / grid;
    for (int i = 0; i < grid; ++i) mass.push_back(integrate_s(cs, edges[i], edges[i + 1]));
  }
  const double total = pairwise_sum(mass);
  if (!(total > 0.0 && std::isfinite(total))) {
    throw QuadratureError(fmt::format("integral of s is {}", total));
  }
  MeasureRepr mu;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    mu.cells.push_back({edges[i], edges[i + 1], mass[i] / total / (edges[i + 1] - edges[i])});
  }
  return mu;
}

double F_infinity(const MeasureRepr& mu, const CoefficientSet& cs, const ConvexFn& phi, double tol) {
  std::vector<DensityCell> cells = mu.cells;
  std::sort(cells.begin(), cells.end(),
            [](const DensityCell& a, const DensityCell& b) { return a.lo < b.lo; });

  std::vector<double> zero_parts;
  std::vector<double> integrals;
  double covered_to = 0.0;
  bool overflow = false;
  for (const auto& c : cells) {
    if (c.lo > covered_to) zero_parts.push_back(c.lo - covered_to);
    covered_to = std::max(covered_to, c.hi);
    const double width = c.hi - c.lo;
    if (width <= 0.0) continue;
    if (c.height == 0.0) {
      zero_parts.push_back(width);
      continue;
    }
    const double h = c.height;
    auto g = [&](double x) {
      const double v = phi(cs.s(x) / (std::numbers::pi * h)) * h;
      if (!std::isfinite(v)) {
        overflow = true;
        return 0.0;
      }
      return v;
    };
    integrals.push_back(integrate_coefficients(cs, c.lo, c.hi, tol * width, g));
    if (overflow) return kInf;
  }
  if (covered_to < 1.0) zero_parts.push_back(1.0 - covered_to);

  double atom_mass = 0.0;
  for (const auto& a : mu.atoms) atom_mass += a.mass;

  const double zero_length = pairwise_sum(zero_parts);
  return pairwise_sum(integrals) + ext_mul(phi.recession_value(), zero_length) +
         ext_mul(phi.value_at_zero(), atom_mass);
}

double limit_cost(const CoefficientSet& cs, const ConvexFn& phi) {
  return phi(integrate_s(cs, 0.0, 1.0) / std::numbers::pi);
}

Recovery recovery_partition(const PiecewiseConstMeasure& mu, int n) {
  mu.validate();
  const int m = mu.m;
  if (n < m) throw ConfigError(fmt::format("recovery needs n >= m, got n = {} < m = {}", n, m));

  RecoveryPlan plan;
  plan.n = n;
  plan.m0 = mu.zero_blocks();
  plan.k.assign(m, 0);
  plan.gammas.assign(m, 0);

  const int target = n - plan.m0;
  std::vector<double> remainder(m, -1.0);
  int assigned = 0;
  for (int i = 0; i < m; ++i) {
    if (mu.alphas[i] == 0.0) {
      plan.k[i] = 1;
      continue;
    }
    const double raw = mu.alphas[i] * target / m;
    const double base = snapped_floor(raw);
    plan.k[i] = static_cast<int>(base);
    remainder[i] = std::max(0.0, raw - base);
    assigned += plan.k[i];
  }

  const int positive = m - plan.m0;
  int deficit = target - assigned;
  if (deficit < 0 || deficit > positive) {
    throw Error(fmt::format("corrector assignment infeasible: deficit {} with {} blocks", deficit, positive));
  }
  for (; deficit > 0; --deficit) {
    int best = -1;
    for (int i = 0; i < m; ++i) {
      if (remainder[i] < 0.0 || plan.gammas[i] == 1) continue;
      if (best < 0 || remainder[i] > remainder[best] + 1e-12) best = i;
    }
    plan.gammas[best] = 1;
    plan.k[best] += 1;
  }

  for (int i = 0; i < m; ++i) {
    if (plan.k[i] < 1) {
      throw ConfigError(fmt::format(
          "n = {} is too small for this measure: block {} (alpha = {}) gets no interval", n, i + 1,
          mu.alphas[i]));
    }
  }

  std::vector<double> x{0.0};
  x.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < m; ++i) {
    const double k = plan.k[i];
    for (int j = 1; j <= plan.k[i]; ++j) {
      x.push_back((i * k + j) / (static_cast<double>(m) * k));
    }
  }
  return {Partition(std::move(x)), std::move(plan)};
}

std::vector<RecoveryRow> verify_recovery(const PiecewiseConstMeasure& mu, const CoefficientSet& cs,
                                         const ConvexFn& phi, const std::vector<int>& n_list,
                                         double rel_tol, int threads) {
  const MeasureRepr target = mu.to_measure();
  const double Finf = F_infinity(target, cs, phi);
  std::vector<RecoveryRow> rows(n_list.size());
  parallel_for(n_list.size(), threads, [&](std::size_t i) {
    const Recovery rec = recovery_partition(mu, n_list[i]);
    RecoveryRow& row = rows[i];
    row.n = n_list[i];
    row.cost = cost_Fn(rec.partition, cs, phi, rel_tol);
    row.F_infinity = Finf;
    row.gap = (std::isinf(row.cost) && row.cost == Finf) ? 0.0 : row.cost - Finf;
    row.rel_gap = Finf != 0.0 && std::isfinite(Finf) ? row.gap / std::fabs(Finf) : row.gap;
    row.w1 = wasserstein1(empirical_measure(rec.partition), target);
  });
  return rows;
}

}  // namespace slpart
