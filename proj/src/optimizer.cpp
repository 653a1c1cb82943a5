#include "slpart/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "slpart/errors.hpp"
#include "slpart/gamma.hpp"
#include "slpart/parallel.hpp"

namespace slpart {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Context {
  const OptimizerConfig& cfg;
  const CoefficientSet& cs;
  const ConvexFn& phi;
  double delta;

  double lambda(double lo, double hi) const {
    const Interval J{lo, hi};
    return J.empty() ? kInf : first_eigenvalue(J, cs, cfg.rel_tol).lambda;
  }
  double term(double lam) const { return cost_term(phi, cfg.n, lam); }
};

struct Descent {
  std::vector<double> x;
  std::vector<double> lambdas;
  std::vector<double> terms;
  double cost = kInf;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> log;
};

// Local objective of breakpoint j: the terms of (x_{j-1}, t) and (t, x_{j+1}).
struct Probe {
  double t = 0.0;
  double lam_left = kInf, lam_right = kInf;
  double term_left = kInf, term_right = kInf;
  double value() const { return term_left + term_right; }
};

Probe probe(const Context& ctx, double lo, double t, double hi) {
  Probe p;
  p.t = t;
  p.lam_left = ctx.lambda(lo, t);
  p.lam_right = ctx.lambda(t, hi);
  p.term_left = ctx.term(p.lam_left);
  p.term_right = ctx.term(p.lam_right);
  return p;
}

// Golden-section search on [a, b]; returns the best point evaluated.
Probe line_search(const Context& ctx, double lo, double hi, double a, double b, double tol) {
  Probe best;
  auto eval = [&](double t) {
    Probe p = probe(ctx, lo, t, hi);
    if (p.value() < best.value()) best = p;
    return p.value();
  };
  if (ctx.delta == 0.0) {
    eval(a);
    eval(b);
  }
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

double total_cost(const std::vector<double>& terms, int n) { return pairwise_sum(terms) / n; }

// Coordinate sweeps shrink the smoothest error mode slowly. After a sweep,
// step further along its displacement with factors 1, 2, 4, ... while the
// total cost keeps decreasing. Returns true when a step was taken.
bool extrapolate(const Context& ctx, const std::vector<double>& before, Descent& r) {
  const int n = ctx.cfg.n;
  bool moved = false;
  std::vector<double> base = r.x;
  for (double omega = 1.0; omega <= 4096.0; omega *= 2.0) {
    std::vector<double> y = base;
    for (int j = 1; j < n; ++j) y[j] += omega * (base[j] - before[j]);
    for (int j = 1; j <= n; ++j) {
      if (!(y[j] - y[j - 1] >= ctx.delta)) return moved;
    }
    std::vector<double> lambdas(n), terms(n);
    for (int i = 0; i < n; ++i) {
      lambdas[i] = ctx.lambda(y[i], y[i + 1]);
      terms[i] = ctx.term(lambdas[i]);
    }
    const double c = total_cost(terms, n);
    if (!(c < r.cost)) return moved;
    r.x = std::move(y);
    r.lambdas = std::move(lambdas);
    r.terms = std::move(terms);
    r.cost = c;
    moved = true;
  }
  return moved;
}

Descent descend(const Context& ctx, std::vector<double> x0) {
  const int n = ctx.cfg.n;
  Descent r;
  r.x = std::move(x0);
  r.lambdas.resize(n);
  r.terms.resize(n);
  for (int i = 0; i < n; ++i) {
    r.lambdas[i] = ctx.lambda(r.x[i], r.x[i + 1]);
    r.terms[i] = ctx.term(r.lambdas[i]);
  }
  r.cost = total_cost(r.terms, n);
  r.log.push_back(r.cost);
  if (n == 1) {
    r.converged = true;
    return r;
  }

  const double ls_tol = std::max(0.25 * ctx.cfg.step_tol, 1e-13);
  // A breakpoint whose neighbours have not moved since its last search
  // would find the same point again.
  std::vector<char> dirty(n + 1, 0);
  std::fill(dirty.begin() + 1, dirty.end() - 1, 1);

  for (int sweep = 1; sweep <= ctx.cfg.max_iters; ++sweep) {
    const std::vector<double> before = r.x;
    double max_move = 0.0;
    for (int j = 1; j < n; ++j) {
      if (!dirty[j]) continue;
      dirty[j] = 0;
      const double lo = r.x[j - 1], hi = r.x[j + 1];
      const double a = lo + ctx.delta, b = hi - ctx.delta;
      if (!(b > a)) continue;
      const Probe best = line_search(ctx, lo, hi, a, b, ls_tol);
      if (!(best.value() < r.terms[j - 1] + r.terms[j])) continue;
      const double move = std::fabs(best.t - r.x[j]);
      r.x[j] = best.t;
      r.lambdas[j - 1] = best.lam_left;
      r.lambdas[j] = best.lam_right;
      r.terms[j - 1] = best.term_left;
      r.terms[j] = best.term_right;
      max_move = std::max(max_move, move);
      if (j > 1) dirty[j - 1] = 1;
      if (j + 1 < n) dirty[j + 1] = 1;
    }
    r.cost = total_cost(r.terms, n);
    r.sweeps = sweep;
    if (max_move < ctx.cfg.step_tol) {
      r.log.push_back(r.cost);
      r.converged = true;
      break;
    }
    if (extrapolate(ctx, before, r)) std::fill(dirty.begin() + 1, dirty.end() - 1, 1);
    r.log.push_back(r.cost);
  }
  return r;
}

// Sorts, clamps to [0, 1] and enforces gaps of at least delta.
void project(std::vector<double>& x, double delta) {
  const std::size_t n = x.size() - 1;
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  std::sort(x.begin(), x.end());
  x.front() = 0.0;
  x.back() = 1.0;
  for (std::size_t j = 1; j < n; ++j) x[j] = std::max(x[j], x[j - 1] + delta);
  for (std::size_t j = n - 1; j >= 1; --j) x[j] = std::min(x[j], x[j + 1] - delta);
}

std::vector<double> jittered(const std::vector<double>& q, std::uint64_t seed, double delta) {
  std::mt19937_64 rng(seed);
  std::vector<double> x = q;
  for (std::size_t j = 1; j + 1 < q.size(); ++j) {
    const double gap = std::min(q[j] - q[j - 1], q[j + 1] - q[j]);
    x[j] = q[j] + 0.25 * gap * (2.0 * uniform01(rng) - 1.0);
  }
  project(x, delta);
  return x;
}
}  // namespace

void OptimizerConfig::validate() const {
  if (n < 1) throw ConfigError(fmt::format("n must be >= 1, got {}", n));
  if (restarts < 1) throw ConfigError(fmt::format("restarts must be >= 1, got {}", restarts));
  if (max_iters < 1) throw ConfigError(fmt::format("max_iters must be >= 1, got {}", max_iters));
  if (!(step_tol > 0.0)) throw ConfigError(fmt::format("step_tol must be > 0, got {}", step_tol));
  if (!(rel_tol > 0.0)) throw ConfigError(fmt::format("rel_tol must be > 0, got {}", rel_tol));
}

Partition quantile_partition(const MeasureRepr& mu, int n) {
  if (n < 1) throw ConfigError(fmt::format("partition size must be >= 1, got {}", n));
  if (!mu.atoms.empty()) throw ConfigError("quantile partition needs a measure without atoms");
  std::vector<DensityCell> cells = mu.cells;
  std::sort(cells.begin(), cells.end(),
            [](const DensityCell& a, const DensityCell& b) { return a.lo < b.lo; });
  const double total = mu.total_mass();
  std::vector<double> x{0.0};
  std::size_t c = 0;
  double below = 0.0;  // mass of cells before c
  for (int j = 1; j < n; ++j) {
    const double target = total * j / n;
    while (c < cells.size() &&
           below + cells[c].height * (cells[c].hi - cells[c].lo) < target) {
      below += cells[c].height * (cells[c].hi - cells[c].lo);
      ++c;
    }
    double v = 1.0;
    if (c < cells.size()) {
      const auto& cell = cells[c];
      v = cell.height > 0.0 ? cell.lo + (target - below) / cell.height : cell.lo;
      v = std::clamp(v, cell.lo, cell.hi);
    }
    x.push_back(std::max(v, x.back()));
  }
  x.push_back(1.0);
  return Partition(std::move(x));
}

Optimum optimize(const OptimizerConfig& cfg, const CoefficientSet& cs, const ConvexFn& phi) {
  cfg.validate();
  const bool allow_empty = cfg.allow_empty && std::isfinite(phi.value_at_zero());
  const Context ctx{cfg, cs, phi, allow_empty ? 0.0 : 1e-9};

  std::vector<double> quantiles;
  if (cfg.restarts > 1) {
    quantiles = quantile_partition(f_infinity(cs, std::max(512, 16 * cfg.n)), cfg.n).breakpoints();
    project(quantiles, ctx.delta);
  }

  std::vector<Descent> runs(cfg.restarts);
  std::vector<std::string> failures(cfg.restarts);
  parallel_for(static_cast<std::size_t>(cfg.restarts), cfg.threads, [&](std::size_t k) {
    std::vector<double> x0 = k == 0 ? Partition::uniform(cfg.n).breakpoints()
                                    : jittered(quantiles, cfg.seed + k, ctx.delta);
    try {
      runs[k] = descend(ctx, std::move(x0));
    } catch (const SolverError& e) {
      failures[k] = e.what();
    } catch (const QuadratureError& e) {
      failures[k] = e.what();
    }
  });

  int best = -1, used = 0;
  for (int k = 0; k < cfg.restarts; ++k) {
    if (!failures[k].empty()) continue;
    ++used;
    if (best < 0 || runs[k].cost < runs[best].cost) best = k;
  }
  if (best < 0) throw SolverError("every restart failed: " + failures.front());

  Descent& r = runs[best];
  Optimum out;
  out.partition = Partition(std::move(r.x));
  out.cost = r.cost;
  out.iterations = r.sweeps;
  out.restarts_used = used;
  out.best_restart = best;
  out.per_interval_lambdas = std::move(r.lambdas);
  out.converged = r.converged;
  out.cost_log = std::move(r.log);
  return out;
}

Optimum brute_force(int n, int grid, const CoefficientSet& cs, const ConvexFn& phi, double rel_tol) {
  if (n < 1 || n > 3) throw ConfigError(fmt::format("brute force supports n in 1..3, got {}", n));
  if (grid < 2 || grid > 400) throw ConfigError(fmt::format("grid must be in 2..400, got {}", grid));

  auto node = [&](int i) { return i == grid ? 1.0 : static_cast<double>(i) / grid; };
  // lam[i][j] = lambda((i / grid, j / grid)), computed on demand.
  std::vector<std::vector<double>> lam(grid + 1, std::vector<double>(grid + 1, -1.0));
  auto lambda = [&](int i, int j) {
    double& v = lam[i][j];
    if (v < 0.0) {
      const Interval J{node(i), node(j)};
      v = J.empty() ? kInf : first_eigenvalue(J, cs, rel_tol).lambda;
    }
    return v;
  };
  auto term = [&](int i, int j) { return cost_term(phi, n, lambda(i, j)); };

  std::vector<int> best_idx;
  double best = kInf;
  bool found = false;
  auto consider = [&](std::vector<int> idx) {
    std::vector<double> terms;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) terms.push_back(term(idx[k], idx[k + 1]));
    const double c = pairwise_sum(terms) / n;
    if (!found || c < best) {
      best = c;
      best_idx = std::move(idx);
      found = true;
    }
  };

  if (n == 1) {
    consider({0, grid});
  } else if (n == 2) {
    for (int i = 1; i < grid; ++i) consider({0, i, grid});
  } else {
    for (int i = 1; i < grid; ++i) {
      for (int j = i; j < grid; ++j) consider({0, i, j, grid});
    }
  }

  Optimum out;
  std::vector<double> x;
  for (int i : best_idx) x.push_back(node(i));
  out.partition = Partition(std::move(x));
  out.cost = best;
  for (std::size_t k = 0; k + 1 < best_idx.size(); ++k) {
    out.per_interval_lambdas.push_back(lambda(best_idx[k], best_idx[k + 1]));
  }
  out.restarts_used = 1;
  out.converged = true;
  out.cost_log = {best};
  return out;
}

}  // namespace slpart
