#include "slpart/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <fmt/format.h>

#include "slpart/errors.hpp"

namespace slpart {
namespace {

// Kronrod abscissae (positive half, descending) and weights; the Gauss
// 7-point rule uses the odd-indexed abscissae.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double pair = f(c - dx) + f(c + dx);
    kron += kWgk[i] * pair;
    if (i % 2 == 1) gauss += kWg[i / 2] * pair;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
  if (!(b >= a)) throw QuadratureError(fmt::format("invalid range [{}, {}]", a, b));
  if (b == a) return {0.0, 0.0, 0};

  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);

  auto converged = [&] {
    if (!std::isfinite(total)) return true;
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(total);
    return err <= std::max(opt.abs_tol, floor);
  };

  while (!converged()) {
    if (static_cast<int>(heap.size()) >= opt.max_intervals) {
      throw QuadratureError(fmt::format(
          "tolerance {} not reached on [{}, {}] within {} subintervals (error {})",
          opt.abs_tol, a, b, opt.max_intervals, err));
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      throw QuadratureError(fmt::format("subinterval collapsed near x={}", mid));
    }
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the leaves to shed accumulated cancellation error.
  const int n = static_cast<int>(heap.size());
  double value = 0.0, error = 0.0;
  std::vector<Segment> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::sort(leaves.begin(), leaves.end(),
            [](const Segment& l, const Segment& r) { return l.a < r.a; });
  for (const auto& s : leaves) {
    value += s.value;
    error += s.error;
  }
  return {value, error, n};
}

QuadResult integrate_pieces(const std::function<double(double)>& f, double a, double b,
                            std::span<const double> breaks, const QuadOptions& opt) {
  std::vector<double> pts{a};
  for (double x : breaks) {
    if (x > a && x < b) pts.push_back(x);
  }
  std::sort(pts.begin() + 1, pts.end());
  pts.push_back(b);

  QuadResult out;
  const double len = b - a;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    QuadOptions piece = opt;
    piece.abs_tol = len > 0 ? opt.abs_tol * (pts[i + 1] - pts[i]) / len : opt.abs_tol;
    QuadResult r = integrate(f, pts[i], pts[i + 1], piece);
    out.value += r.value;
    out.error += r.error;
    out.intervals += r.intervals;
  }
  return out;
}

}  // namespace slpart
