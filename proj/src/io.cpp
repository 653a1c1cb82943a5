#include "slpart/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "slpart/errors.hpp"

namespace slpart {
namespace {
using nlohmann::json;

const json& require(const json& j, const char* key, std::string_view where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(fmt::format("{}: missing \"{}\"", where, key));
  }
  return j.at(key);
}

double number(const json& v, std::string_view what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError(fmt::format("{} must be a number", what));
}

int integer(const json& v, std::string_view what) {
  if (!v.is_number_integer()) throw ConfigError(fmt::format("{} must be an integer", what));
  return v.get<int>();
}

std::vector<double> numbers(const json& v, std::string_view what) {
  if (!v.is_array()) throw ConfigError(fmt::format("{} must be an array", what));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], fmt::format("{}[{}]", what, i)));
  return out;
}

Coefficient parse_coefficient(const json& v, std::string_view name) {
  if (v.is_number()) return Coefficient::constant(v.get<double>());
  if (v.is_string()) {
    try {
      return Coefficient::expression(v.get<std::string>());
    } catch (const ParseError& e) {
      throw ConfigError(fmt::format("coefficient {}: {} (offset {})", name, e.what(), e.offset()));
    }
  }
  if (v.is_object() && v.contains("cells")) {
    const json& cells = v.at("cells");
    if (!cells.is_array() || cells.empty()) {
      throw ConfigError(fmt::format("coefficient {}: cells must be a non-empty array", name));
    }
    std::vector<TableCell> table;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto c = numbers(cells[i], fmt::format("{}.cells[{}]", name, i));
      if (c.size() != 3) throw ConfigError(fmt::format("{}.cells[{}] needs [lo, hi, value]", name, i));
      table.push_back({c[0], c[1], c[2]});
    }
    return PiecewiseTable(std::move(table));
  }
  throw ConfigError(fmt::format("coefficient {} must be a string, a number or {{\"cells\": ...}}", name));
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += fmt::format("\\u{:04x}", static_cast<int>(c));
        } else {
          out += c;
        }
    }
  }
  return out;
}
}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

CoefficientSet parse_coefficients(const json& j) {
  constexpr std::string_view where = "coefficients";
  return CoefficientSet{parse_coefficient(require(j, "p", where), "p"),
                        parse_coefficient(require(j, "q", where), "q"),
                        parse_coefficient(require(j, "w", where), "w"),
                        number(require(j, "beta", where), "beta")};
}

ConvexFn parse_phi(const json& j) {
  constexpr std::string_view where = "phi";
  const json& kind_v = require(j, "kind", where);
  if (!kind_v.is_string()) throw ConfigError("phi.kind must be a string");
  const auto kind = kind_v.get<std::string>();
  auto param = [&](const char* key, double fallback) {
    return j.contains(key) ? number(j.at(key), fmt::format("phi.{}", key)) : fallback;
  };
  if (kind == "power") return ConvexFn::power(param("r", 1.0));
  if (kind == "power_inverse") return ConvexFn::power_inverse(param("r", 1.0));
  if (kind == "shifted") return ConvexFn::shifted(param("a", 1.0), param("b", 1.0));
  if (kind == "heat") return ConvexFn::heat();
  if (kind == "custom") {
    const json& e = require(j, "expr", where);
    if (!e.is_string()) throw ConfigError("phi.expr must be a string");
    const double v0 = number(require(j, "value_at_zero", where), "phi.value_at_zero");
    const json& rec = require(j, "recession", where);
    const std::string r = rec.is_string() ? rec.get<std::string>() : "";
    Recession recession;
    if (r == "zero") {
      recession = Recession::Zero;
    } else if (r == "infinite") {
      recession = Recession::Infinite;
    } else {
      throw ConfigError("phi.recession must be \"zero\" or \"infinite\"; finite nonzero growth is not supported");
    }
    try {
      return ConvexFn::custom(parse_expr(e.get<std::string>()), v0, recession);
    } catch (const ParseError& err) {
      throw ConfigError(fmt::format("phi.expr: {} (offset {})", err.what(), err.offset()));
    }
  }
  throw ConfigError(fmt::format("unknown phi kind \"{}\"", kind));
}

PiecewiseConstMeasure parse_block_measure(const json& j) {
  PiecewiseConstMeasure mu;
  mu.m = integer(require(j, "m", "measure"), "measure.m");
  mu.alphas = numbers(require(j, "alphas", "measure"), "measure.alphas");
  mu.validate();
  return mu;
}

MeasureRepr parse_measure_repr(const json& j) {
  MeasureRepr mu;
  if (j.contains("cells")) {
    const json& cells = j.at("cells");
    if (!cells.is_array()) throw ConfigError("measure.cells must be an array");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto c = numbers(cells[i], fmt::format("measure.cells[{}]", i));
      if (c.size() != 3) throw ConfigError(fmt::format("measure.cells[{}] needs [lo, hi, height]", i));
      mu.cells.push_back({c[0], c[1], c[2]});
    }
  }
  if (j.contains("atoms")) {
    const json& atoms = j.at("atoms");
    if (!atoms.is_array()) throw ConfigError("measure.atoms must be an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto a = numbers(atoms[i], fmt::format("measure.atoms[{}]", i));
      if (a.size() != 2) throw ConfigError(fmt::format("measure.atoms[{}] needs [x, mass]", i));
      mu.atoms.push_back({a[0], a[1]});
    }
  }
  // Hand-written decimal heights rarely sum to 1 in binary.
  mu.validate(1e-9);
  return mu;
}

MeasureInput parse_measure(const json& j) {
  if (!j.is_object()) throw ConfigError("measure must be a JSON object");
  if (j.contains("alphas")) return parse_block_measure(j);
  return parse_measure_repr(j);
}

MeasureRepr to_measure_repr(const MeasureInput& m) {
  if (const auto* b = std::get_if<PiecewiseConstMeasure>(&m)) return b->to_measure();
  return std::get<MeasureRepr>(m);
}

Partition parse_partition(const json& j) {
  return Partition(numbers(require(j, "breakpoints", "partition"), "breakpoints"));
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg{parse_coefficients(j.contains("coefficients") ? j.at("coefficients") : j), std::nullopt,
                false};
  if (j.contains("phi")) cfg.phi = parse_phi(j.at("phi"));
  if (j.contains("relax_q")) {
    if (!j.at("relax_q").is_boolean()) throw ConfigError("relax_q must be true or false");
    cfg.relax_q = j.at("relax_q").get<bool>();
  }
  return cfg;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string json_number(double v) {
  return std::isfinite(v) ? format_number(v) : "\"" + format_number(v) + "\"";
}

std::string json_string(std::string_view s) { return "\"" + escape(s) + "\""; }

std::string json_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += json_number(v[i]);
  }
  return out + "]";
}

JsonObject& JsonObject::add(std::string_view key, double v) { return add_raw(key, json_number(v)); }
JsonObject& JsonObject::add(std::string_view key, int v) { return add_raw(key, std::to_string(v)); }
JsonObject& JsonObject::add(std::string_view key, bool v) { return add_raw(key, v ? "true" : "false"); }
JsonObject& JsonObject::add(std::string_view key, std::string_view v) { return add_raw(key, json_string(v)); }
JsonObject& JsonObject::add(std::string_view key, const std::vector<double>& v) {
  return add_raw(key, json_array(v));
}
JsonObject& JsonObject::add(std::string_view key, const JsonObject& v) {
  return add_raw(key, v.str(1));
}

JsonObject& JsonObject::add_raw(std::string_view key, std::string raw) {
  fields_.emplace_back(std::string(key), std::move(raw));
  return *this;
}

std::string JsonObject::str(int indent) const {
  const std::string pad(2 * (indent + 1), ' ');
  const std::string close(2 * indent, ' ');
  std::string out = "{";
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    out += i ? ",\n" : "\n";
    out += pad + json_string(fields_[i].first) + ": " + fields_[i].second;
  }
  out += fields_.empty() ? "}" : "\n" + close + "}";
  if (indent == 0) out += "\n";
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) {
    throw Error(fmt::format("CSV row has {} cells, header has {}", cells.size(), width_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

std::string measure_csv(const MeasureRepr& mu) {
  CsvWriter csv({"kind", "lo", "hi", "value"});
  for (const auto& c : mu.cells) {
    csv.row({"cell", format_number(c.lo), format_number(c.hi), format_number(c.height)});
  }
  for (const auto& a : mu.atoms) {
    csv.row({"atom", format_number(a.x), format_number(a.x), format_number(a.mass)});
  }
  return csv.str();
}

std::string partition_json(const Partition& P) {
  return JsonObject().add("breakpoints", P.breakpoints()).str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", path));
  out << text;
  if (!out) throw Error(fmt::format("write to {} failed", path));
}

}  // namespace slpart
