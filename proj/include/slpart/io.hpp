#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "slpart/coefficients.hpp"
#include "slpart/gamma.hpp"
#include "slpart/partition.hpp"
#include "slpart/phi.hpp"

namespace slpart {

// ---- input -------------------------------------------------------------

/// Reads and parses a JSON file; throws ConfigError with the path on
/// failure.
nlohmann::json load_json(const std::string& path);

/// {"p": c, "q": c, "w": c, "beta": number} where c is an expression
/// string, a number or {"cells": [[lo, hi, value], ...]}.
CoefficientSet parse_coefficients(const nlohmann::json& j);

/// {"kind": "power" | "power_inverse" | "shifted" | "heat" | "custom",
///  "r", "a", "b", "expr", "value_at_zero": number | "inf",
///  "recession": "zero" | "infinite"}.
ConvexFn parse_phi(const nlohmann::json& j);

/// {"m": int, "alphas": [...]}.
PiecewiseConstMeasure parse_block_measure(const nlohmann::json& j);

/// {"cells": [[lo, hi, height], ...], "atoms": [[x, mass], ...]}.
MeasureRepr parse_measure_repr(const nlohmann::json& j);

using MeasureInput = std::variant<PiecewiseConstMeasure, MeasureRepr>;
/// Either form, told apart by the presence of "alphas".
MeasureInput parse_measure(const nlohmann::json& j);
MeasureRepr to_measure_repr(const MeasureInput& m);

/// {"breakpoints": [0, ..., 1]}.
Partition parse_partition(const nlohmann::json& j);

/// Run configuration: the coefficient block (under "coefficients", or the
/// p/q/w/beta keys at top level), an optional "phi" block and "relax_q".
struct RunConfig {
  CoefficientSet coefficients;
  std::optional<ConvexFn> phi;
  bool relax_q = false;
};

RunConfig parse_run_config(const nlohmann::json& j);

// ---- output ------------------------------------------------------------

/// 17 significant digits; inf and nan as the strings "inf", "-inf", "nan"
/// inside JSON and bare in CSV.
std::string format_number(double v);
std::string json_number(double v);
std::string json_string(std::string_view s);
std::string json_array(const std::vector<double>& v);

/// Ordered JSON object built from pre-rendered values.
class JsonObject {
 public:
  JsonObject& add(std::string_view key, double v);
  JsonObject& add(std::string_view key, int v);
  JsonObject& add(std::string_view key, bool v);
  JsonObject& add(std::string_view key, std::string_view v);
  JsonObject& add(std::string_view key, const char* v) { return add(key, std::string_view(v)); }
  JsonObject& add(std::string_view key, const std::vector<double>& v);
  JsonObject& add(std::string_view key, const JsonObject& v);
  JsonObject& add_raw(std::string_view key, std::string raw);
  /// Pretty printed with two-space indent and a trailing newline at the top
  /// level.
  std::string str(int indent = 0) const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

/// Comma-separated rows with a header and LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  const std::string& str() const noexcept { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

std::string measure_csv(const MeasureRepr& mu);
std::string partition_json(const Partition& P);

/// Writes in binary mode so line endings are LF everywhere.
void write_file(const std::string& path, const std::string& text);

}  // namespace slpart
