#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "slpart/errors.hpp"
#include "slpart/io.hpp"

using namespace slpart;
using nlohmann::json;

TEST_CASE("coefficient blocks") {
  const auto cs = parse_coefficients(json::parse(R"({"p": "1 + x", "q": 0, "w": {"cells": [[0, 0.5, 4], [0.5, 1, 1]]}, "beta": 4})"));
  CHECK(cs.p(0.5) == 1.5);
  CHECK(cs.q(0.3) == 0.0);
  CHECK(cs.w(0.25) == 4.0);
  CHECK(cs.w(0.5) == 1.0);
  CHECK(cs.beta == 4.0);
  CHECK_THROWS_AS(parse_coefficients(json::parse(R"({"p": 1, "q": 0, "w": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_coefficients(json::parse(R"({"p": 1, "q": 0, "w": [1], "beta": 2})")), ConfigError);
  CHECK_THROWS_AS(parse_coefficients(json::parse(R"({"p": "1 +", "q": 0, "w": 1, "beta": 2})")), ConfigError);
}

TEST_CASE("phi blocks") {
  CHECK(parse_phi(json::parse(R"({"kind": "power", "r": 2})"))(2) == 16.0);
  CHECK(parse_phi(json::parse(R"({"kind": "power_inverse"})"))(2) == 0.25);
  CHECK(parse_phi(json::parse(R"({"kind": "shifted", "a": 1, "b": 2})"))(1) == 2.0);
  CHECK(parse_phi(json::parse(R"({"kind": "heat"})")).kind() == PhiKind::Heat);
  const auto c = parse_phi(json::parse(R"({"kind": "custom", "expr": "1/x", "value_at_zero": "inf", "recession": "zero"})"));
  CHECK(std::isinf(c(0)));
  CHECK(c(4) == 0.25);
  CHECK_THROWS_AS(parse_phi(json::parse(R"({"kind": "linear"})")), ConfigError);
  CHECK_THROWS_AS(parse_phi(json::parse(R"({"kind": "custom", "expr": "x^2", "value_at_zero": 0})")), ConfigError);
  CHECK_THROWS_AS(
      parse_phi(json::parse(R"({"kind": "custom", "expr": "x^2", "value_at_zero": 0, "recession": "linear"})")),
      ConfigError);
}

TEST_CASE("measures and partitions") {
  const auto block = parse_measure(json::parse(R"({"m": 2, "alphas": [1.2, 0.8]})"));
  REQUIRE(std::holds_alternative<PiecewiseConstMeasure>(block));
  const auto mu = to_measure_repr(block);
  CHECK(mu.total_mass() == doctest::Approx(1.0));
  const auto repr = parse_measure(json::parse(R"({"cells": [[0, 0.5, 1]], "atoms": [[0.75, 0.5]]})"));
  REQUIRE(std::holds_alternative<MeasureRepr>(repr));
  CHECK(std::get<MeasureRepr>(repr).atoms.size() == 1);
  CHECK_THROWS_AS(parse_measure(json::parse(R"({"cells": [[0, 0.5, 1]]})")), ConfigError);
  CHECK_THROWS_AS(parse_measure(json::parse(R"({"m": 2, "alphas": [1.2, 0.7]})")), ConfigError);
  CHECK(parse_partition(json::parse(R"({"breakpoints": [0, 0.5, 1]})")).n() == 2);
  CHECK_THROWS_AS(parse_partition(json::parse(R"({"breakpoints": [0, 0.7, 0.5, 1]})")), ConfigError);
}

TEST_CASE("run config layouts") {
  const auto a = parse_run_config(json::parse(R"({"coefficients": {"p": 1, "q": 0, "w": 1, "beta": 2}, "phi": {"kind": "power"}})"));
  CHECK(a.phi.has_value());
  const auto b = parse_run_config(json::parse(R"({"p": 1, "q": -1, "w": 1, "beta": 2, "relax_q": true})"));
  CHECK_FALSE(b.phi.has_value());
  CHECK(b.relax_q);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "\"inf\"");
  CHECK(json_string("a\"b\\c\n") == "\"a\\\"b\\\\c\\n\"");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("json objects round-trip through the parser") {
  JsonObject inner;
  inner.add("lo", 1.5).add("hi", 2.0);
  JsonObject o;
  o.add("lambda", 9.869604401089358).add("n", 3).add("ok", true).add("name", "x").add("v", std::vector<double>{0, 0.5, 1});
  o.add("bounds", inner);
  const std::string text = o.str();
  CHECK(text.back() == '\n');
  const json j = json::parse(text);
  CHECK(j["lambda"].get<double>() == 9.869604401089358);
  CHECK(j["n"] == 3);
  CHECK(j["ok"] == true);
  CHECK(j["v"].size() == 3);
  CHECK(j["bounds"]["hi"] == 2.0);
}

TEST_CASE("csv output") {
  CsvWriter w({"a", "b"});
  w.row({"1", "2"}).row({"3", "4"});
  CHECK(w.str() == "a,b\n1,2\n3,4\n");
  CHECK_THROWS(w.row({"1"}));
  const MeasureRepr mu{{{0.0, 0.5, 1.0}}, {{0.75, 0.5}}};
  const std::string csv = measure_csv(mu);
  CHECK(csv.rfind("kind,lo,hi,value\ncell,0,0.5,1\n", 0) == 0);
  CHECK(csv.find("atom,0.75,0.75,0.5") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "slpart_test_io";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "c.json").string();
  write_file(path, R"({"p": 1, "q": 0, "w": 1, "beta": 2})");
  CHECK(load_json(path)["beta"] == 2);
  CHECK_THROWS_AS(load_json((dir / "missing.json").string()), ConfigError);
  write_file(path, "{not json");
  CHECK_THROWS_AS(load_json(path), ConfigError);
  std::filesystem::remove_all(dir);
}
