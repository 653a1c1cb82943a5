#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slpart/expr.hpp"

namespace slpart {

/// Recession factor lim phi(t)/t: only the null and infinite cases are
/// supported.
enum class Recession { Zero, Infinite };

enum class PhiKind { PowerInverse, Power, Shifted, Heat, Custom };

/// Product with the conventions 0 * inf = 0 and c * inf = inf for c > 0.
inline double ext_mul(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

/// Strictly convex cost phi on [0, inf) with declared phi(0) and recession.
class ConvexFn {
 public:
  /// phi(t) = t^(-2r), r > 0. phi(0) = inf, recession zero.
  static ConvexFn power_inverse(double r);
  /// phi(t) = t^(2r), r > 1/2. phi(0) = 0, recession infinite.
  static ConvexFn power(double r);
  /// phi(t) = (t - a)^2 + b, a, b > 0. phi(0) = a^2 + b, recession infinite.
  static ConvexFn shifted(double a, double b);
  /// phi(t) = exp(1 / t^2). phi(0) = inf, recession zero.
  static ConvexFn heat();
  /// User expression written in the variable `x` (standing for t). The
  /// boundary data are taken as declared, never inferred.
  static ConvexFn custom(CoeffExpr expr, double value_at_zero, Recession recession);

  /// phi(t) for t >= 0; phi(0) is the declared value. Throws ConfigError
  /// for negative or NaN arguments.
  double operator()(double t) const;

  PhiKind kind() const noexcept { return kind_; }
  double value_at_zero() const noexcept { return value_at_zero_; }
  Recession recession() const noexcept { return recession_; }
  /// 0 or +inf.
  double recession_value() const noexcept;

  double r() const noexcept { return r_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  const std::optional<CoeffExpr>& expr() const noexcept { return expr_; }

  std::string describe() const;

 private:
  ConvexFn() = default;

  PhiKind kind_ = PhiKind::Power;
  double r_ = 1.0, a_ = 0.0, b_ = 0.0;
  double value_at_zero_ = 0.0;
  Recession recession_ = Recession::Infinite;
  std::optional<CoeffExpr> expr_;
};

double eval_phi(const ConvexFn& f, double t);

struct PhiParams {
  double r = 1.0;
  double a = 1.0;
  double b = 1.0;
};

struct PhiPreset {
  std::string name;
  std::function<ConvexFn(const PhiParams&)> make;
};

/// The example families: power_inverse, power, shifted and heat.
std::vector<PhiPreset> presets();

/// Sampled sanity checks of the standing hypotheses: non-negativity,
/// midpoint convexity with a strictness witness, recession consistent with
/// the declaration, and monotonicity when the recession is zero. Returns one
/// message per failed check; never modifies the function.
std::vector<std::string> check_hypotheses(const ConvexFn& f, std::uint64_t seed = 1);

}  // namespace slpart
