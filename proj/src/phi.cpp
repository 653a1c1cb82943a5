#include "slpart/phi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "slpart/errors.hpp"

namespace slpart {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

ConvexFn ConvexFn::power_inverse(double r) {
  if (!(r > 0.0 && std::isfinite(r))) {
    throw ConfigError(fmt::format("power_inverse needs r > 0, got {}", r));
  }
  ConvexFn f;
  f.kind_ = PhiKind::PowerInverse;
  f.r_ = r;
  f.value_at_zero_ = kInf;
  f.recession_ = Recession::Zero;
  return f;
}

ConvexFn ConvexFn::power(double r) {
  if (!(r > 0.5 && std::isfinite(r))) {
    throw ConfigError(fmt::format("power needs r > 1/2 (strictly convex, superlinear), got {}", r));
  }
  ConvexFn f;
  f.kind_ = PhiKind::Power;
  f.r_ = r;
  f.value_at_zero_ = 0.0;
  f.recession_ = Recession::Infinite;
  return f;
}

ConvexFn ConvexFn::shifted(double a, double b) {
  if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
    throw ConfigError(fmt::format("shifted needs a, b > 0, got a={}, b={}", a, b));
  }
  ConvexFn f;
  f.kind_ = PhiKind::Shifted;
  f.a_ = a;
  f.b_ = b;
  f.value_at_zero_ = a * a + b;
  f.recession_ = Recession::Infinite;
  return f;
}

ConvexFn ConvexFn::heat() {
  ConvexFn f;
  f.kind_ = PhiKind::Heat;
  f.value_at_zero_ = kInf;
  f.recession_ = Recession::Zero;
  return f;
}

ConvexFn ConvexFn::custom(CoeffExpr expr, double value_at_zero, Recession recession) {
  if (std::isnan(value_at_zero) || value_at_zero < 0.0) {
    throw ConfigError("custom phi needs value_at_zero >= 0 or inf");
  }
  ConvexFn f;
  f.kind_ = PhiKind::Custom;
  f.value_at_zero_ = value_at_zero;
  f.recession_ = recession;
  f.expr_ = std::move(expr);
  return f;
}

double ConvexFn::operator()(double t) const {
  if (std::isnan(t) || t < 0.0) throw ConfigError(fmt::format("phi evaluated at t={}", t));
  if (t == 0.0) return value_at_zero_;
  switch (kind_) {
    case PhiKind::PowerInverse: return std::pow(t, -2.0 * r_);
    case PhiKind::Power: return std::pow(t, 2.0 * r_);
    case PhiKind::Shifted: return (t - a_) * (t - a_) + b_;
    case PhiKind::Heat: return std::exp(1.0 / (t * t));
    case PhiKind::Custom: return (*expr_)(t);
  }
  return kInf;
}

double ConvexFn::recession_value() const noexcept {
  return recession_ == Recession::Zero ? 0.0 : kInf;
}

std::string ConvexFn::describe() const {
  switch (kind_) {
    case PhiKind::PowerInverse: return fmt::format("power_inverse(r={})", r_);
    case PhiKind::Power: return fmt::format("power(r={})", r_);
    case PhiKind::Shifted: return fmt::format("shifted(a={}, b={})", a_, b_);
    case PhiKind::Heat: return "heat";
    case PhiKind::Custom: return fmt::format("custom({})", expr_->source());
  }
  return "?";
}

double eval_phi(const ConvexFn& f, double t) { return f(t); }

std::vector<PhiPreset> presets() {
  return {
      {"power_inverse", [](const PhiParams& p) { return ConvexFn::power_inverse(p.r); }},
      {"power", [](const PhiParams& p) { return ConvexFn::power(p.r); }},
      {"shifted", [](const PhiParams& p) { return ConvexFn::shifted(p.a, p.b); }},
      {"heat", [](const PhiParams&) { return ConvexFn::heat(); }},
  };
}

std::vector<std::string> check_hypotheses(const ConvexFn& f, std::uint64_t seed) {
  std::vector<std::string> issues;
  std::mt19937_64 rng(seed);

  // Log-uniform samples in [0.05, 20]: wide enough to see the shape, narrow
  // enough that exp(1/t^2) stays finite.
  auto sample = [&] { return 0.05 * std::pow(400.0, uniform01(rng)); };

  std::vector<double> ts(200);
  for (double& t : ts) t = sample();
  std::sort(ts.begin(), ts.end());
  for (double t : ts) {
    const double v = f(t);
    if (!(v >= 0.0)) {
      issues.push_back(fmt::format("phi({}) = {} is negative", t, v));
      break;
    }
  }

  bool strict = false;
  for (int i = 0; i < 200; ++i) {
    const double a = sample(), b = sample();
    const double mid = f(0.5 * (a + b));
    const double chord = 0.5 * (f(a) + f(b));
    if (mid > chord * (1.0 + 1e-12) + 1e-300) {
      issues.push_back(fmt::format("midpoint convexity fails between {} and {}", a, b));
      break;
    }
    if (mid < chord * (1.0 - 1e-9)) strict = true;
  }
  if (!strict) issues.push_back("no strict-convexity witness found");

  // phi(T)/T < 1 at T = 1e6 for null recession; increasing and >= 1 for
  // infinite recession.
  const double r2 = f(1e2) / 1e2, r4 = f(1e4) / 1e4, r6 = f(1e6) / 1e6;
  if (f.recession() == Recession::Zero) {
    if (!(r6 < 1.0)) issues.push_back(fmt::format("declared null recession but phi(T)/T = {}", r6));
    for (std::size_t i = 1; i < ts.size(); ++i) {
      if (f(ts[i]) > f(ts[i - 1]) * (1.0 + 1e-12)) {
        issues.push_back("declared null recession but phi is increasing somewhere");
        break;
      }
    }
  } else if (!(r6 >= 1.0 && r6 > r4 && r4 > r2)) {
    issues.push_back(fmt::format("declared infinite recession but phi(T)/T = {} at T=1e6", r6));
  }
  return issues;
}

}  // namespace slpart
