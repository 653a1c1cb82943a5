#include "slpart/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "slpart/errors.hpp"
#include "slpart/experiments.hpp"
#include "slpart/gamma.hpp"
#include "slpart/io.hpp"
#include "slpart/optimizer.hpp"
#include "slpart/sl_solver.hpp"

namespace slpart::cli {
namespace {

struct Common {
  std::string config;
  std::string phi;
  std::string out;
  int threads = 1;
  bool relax_q = false;
};

void add_config(CLI::App& app, Common& c) {
  app.add_option("--config", c.config, "JSON file with the coefficient block")->required();
}
void add_phi(CLI::App& app, Common& c) {
  app.add_option("--phi", c.phi,
                 "cost function: inline JSON, a JSON file, or kind[:key=value,...]; "
                 "overrides the config's phi block");
}
void add_threads(CLI::App& app, Common& c) {
  app.add_option("--threads", c.threads, "worker cap")->check(CLI::PositiveNumber);
}

RunConfig load_config(const Common& c) {
  RunConfig cfg = parse_run_config(load_json(c.config));
  ValidationOptions vo;
  vo.relax_q = cfg.relax_q || c.relax_q;
  const ValidationReport report = validate(cfg.coefficients, vo);
  if (!report.ok()) throw ConfigError("coefficients violate the standing bounds:\n" + report.summary());
  return cfg;
}

// kind[:key=value,...] shorthand.
nlohmann::json phi_shorthand(const std::string& s) {
  nlohmann::json j;
  const auto colon = s.find(':');
  j["kind"] = s.substr(0, colon);
  if (colon == std::string::npos) return j;
  std::string rest = s.substr(colon + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = std::min(rest.find(',', pos), rest.size());
    const std::string item = rest.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("--phi: expected key=value, got \"{}\"", item));
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end && *end == '\0' && !value.empty()) {
      j[key] = v;
    } else {
      j[key] = value;
    }
    pos = comma + 1;
  }
  return j;
}

ConvexFn resolve_phi(const Common& c, const RunConfig& cfg, std::ostream& err) {
  std::optional<ConvexFn> phi;
  if (!c.phi.empty()) {
    nlohmann::json j;
    if (c.phi.front() == '{') {
      try {
        j = nlohmann::json::parse(c.phi);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("--phi: {}", e.what()));
      }
    } else if (std::filesystem::is_regular_file(c.phi)) {
      j = load_json(c.phi);
      if (j.contains("phi")) j = j.at("phi");
    } else {
      j = phi_shorthand(c.phi);
    }
    phi = parse_phi(j);
  } else {
    phi = cfg.phi;
  }
  if (!phi) throw ConfigError("no cost function: pass --phi or add a phi block to the config");
  if (phi->kind() == PhiKind::Custom) {
    const auto issues = check_hypotheses(*phi);
    // Declared boundary data stand; failed checks are reported only.
    for (const auto& i : issues) err << "warning: custom phi: " << i << "\n";
  }
  return *phi;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
}

using Handler = std::function<void()>;

// Each subcommand registers its options on `app` and returns the action to
// run after a successful parse.
Handler setup_eig(CLI::App& app, Common& c, std::ostream& out) {
  auto lo = std::make_shared<double>(0.0), hi = std::make_shared<double>(1.0);
  auto rel_tol = std::make_shared<double>(1e-8);
  auto eigen_csv = std::make_shared<std::string>();
  add_config(app, c);
  app.add_option("--lo", *lo, "left end of the interval");
  app.add_option("--hi", *hi, "right end of the interval");
  app.add_option("--rel-tol", *rel_tol, "relative tolerance");
  app.add_flag("--relax-q", c.relax_q, "allow negative q");
  app.add_option("--out", c.out, "JSON output file (default stdout)");
  app.add_option("--eigenfunction-csv", *eigen_csv, "write the eigenfunction samples as x,u");
  return [=, &c, &out] {
    const RunConfig cfg = load_config(c);
    if (!(*lo >= 0.0 && *hi <= 1.0 && *hi - *lo >= Interval::kEmptyLength)) {
      throw ConfigError(fmt::format("need 0 <= lo < hi <= 1, got lo = {}, hi = {}", *lo, *hi));
    }
    if (!(*rel_tol > 0.0 && *rel_tol < 1.0)) throw ConfigError("--rel-tol must lie in (0, 1)");
    const Interval J{*lo, *hi};
    SolverOptions opt;
    opt.rel_tol = *rel_tol;
    opt.want_eigenfunction = !eigen_csv->empty();
    const EigenResult r = first_eigenvalue(J, cfg.coefficients, opt);
    const Bounds g = global_bounds(J, cfg.coefficients.beta);
    JsonObject o;
    o.add("lambda", r.lambda)
        .add("error_estimate", r.error_estimate)
        .add("grid_size", r.grid_size)
        .add("global_bounds", JsonObject().add("lo", g.lo).add("hi", g.hi))
        .add("local_bounds", JsonObject()
                                 .add("lo", local_lower_bound(J, cfg.coefficients))
                                 .add("hi", local_upper_bound(J, cfg.coefficients)));
    emit(c.out, o.str(), out);
    if (!eigen_csv->empty()) {
      CsvWriter csv({"x", "u"});
      for (const auto& [x, u] : r.eigenfunction) csv.row({format_number(x), format_number(u)});
      write_file(*eigen_csv, csv.str());
    }
  };
}

Handler setup_optimize(CLI::App& app, Common& c, std::ostream& out, std::ostream& err) {
  auto cfg = std::make_shared<OptimizerConfig>();
  add_config(app, c);
  add_phi(app, c);
  add_threads(app, c);
  app.add_option("--n", cfg->n, "number of intervals")->required();
  app.add_option("--restarts", cfg->restarts, "multistart count");
  app.add_option("--seed", cfg->seed, "jitter seed")->required();
  app.add_option("--step-tol", cfg->step_tol, "stop when no breakpoint moves more than this");
  app.add_option("--max-iters", cfg->max_iters, "sweeps per restart");
  app.add_option("--rel-tol", cfg->rel_tol, "eigenvalue tolerance");
  app.add_flag("--allow-empty", cfg->allow_empty, "allow coincident breakpoints when phi(0) is finite");
  app.add_option("--out", c.out, "JSON output file (default stdout)");
  return [=, &c, &out, &err] {
    const RunConfig rc = load_config(c);
    const ConvexFn phi = resolve_phi(c, rc, err);
    OptimizerConfig oc = *cfg;
    oc.threads = c.threads;
    oc.validate();
    const Optimum o = optimize(oc, rc.coefficients, phi);
    JsonObject j;
    j.add("breakpoints", o.partition.breakpoints())
        .add("cost", o.cost)
        .add("lambdas", o.per_interval_lambdas)
        .add("converged", o.converged)
        .add("iterations", o.iterations)
        .add("restarts_used", o.restarts_used)
        .add("best_restart", o.best_restart);
    emit(c.out, j.str(), out);
  };
}

Handler setup_gamma(CLI::App& app, Common& c, std::ostream& out, std::ostream& err) {
  auto measure = std::make_shared<std::string>();
  auto grid = std::make_shared<int>(256);
  auto finf_csv = std::make_shared<std::string>();
  add_config(app, c);
  add_phi(app, c);
  app.add_option("--measure", *measure, "JSON measure: {m, alphas} or {cells, atoms}")->required();
  app.add_option("--grid", *grid, "cells for the f_infinity density when coefficients are not tables")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "JSON output file (default stdout)");
  app.add_option("--finf-csv", *finf_csv, "write f_infinity as a measure CSV");
  return [=, &c, &out, &err] {
    const RunConfig rc = load_config(c);
    const ConvexFn phi = resolve_phi(c, rc, err);
    const MeasureRepr mu = to_measure_repr(parse_measure(load_json(*measure)));
    JsonObject j;
    j.add("F_infinity", F_infinity(mu, rc.coefficients, phi))
        .add("limit_cost", limit_cost(rc.coefficients, phi));
    emit(c.out, j.str(), out);
    if (!finf_csv->empty()) write_file(*finf_csv, measure_csv(f_infinity(rc.coefficients, *grid)));
  };
}

Handler setup_recovery(CLI::App& app, Common& c, std::ostream& out, std::ostream& err) {
  auto measure = std::make_shared<std::string>();
  auto n_list = std::make_shared<std::vector<int>>();
  auto rel_tol = std::make_shared<double>(1e-10);
  add_config(app, c);
  add_phi(app, c);
  add_threads(app, c);
  app.add_option("--measure", *measure, "JSON block measure {m, alphas}")->required();
  app.add_option("--n-list", *n_list, "comma-separated partition sizes")->required()->delimiter(',');
  app.add_option("--rel-tol", *rel_tol, "eigenvalue tolerance");
  app.add_option("--out-csv", c.out, "CSV output file (default stdout)");
  return [=, &c, &out, &err] {
    const RunConfig rc = load_config(c);
    const ConvexFn phi = resolve_phi(c, rc, err);
    const MeasureInput m = parse_measure(load_json(*measure));
    const auto* block = std::get_if<PiecewiseConstMeasure>(&m);
    if (!block) throw ConfigError("recovery needs a block measure {\"m\": ..., \"alphas\": [...]}");
    for (int n : *n_list) {
      if (n < block->m) throw ConfigError(fmt::format("n = {} is below the block count m = {}", n, block->m));
    }
    const auto rows = verify_recovery(*block, rc.coefficients, phi, *n_list, *rel_tol, c.threads);
    CsvWriter csv({"n", "F_n", "F_infinity", "gap", "rel_gap", "w1"});
    for (const auto& r : rows) {
      csv.row({std::to_string(r.n), format_number(r.cost), format_number(r.F_infinity), format_number(r.gap),
               format_number(r.rel_gap), format_number(r.w1)});
    }
    emit(c.out, csv.str(), out);
  };
}

Handler setup_verify(CLI::App& app, Common& c, std::ostream& out, std::ostream& err) {
  auto cfg = std::make_shared<OptimizerConfig>();
  auto n_list = std::make_shared<std::vector<int>>();
  add_config(app, c);
  add_phi(app, c);
  add_threads(app, c);
  app.add_option("--n-list", *n_list, "comma-separated, increasing partition sizes")
      ->required()
      ->delimiter(',');
  app.add_option("--seed", cfg->seed, "jitter seed")->required();
  app.add_option("--restarts", cfg->restarts, "multistart count");
  app.add_option("--step-tol", cfg->step_tol, "stop when no breakpoint moves more than this");
  app.add_option("--max-iters", cfg->max_iters, "sweeps per restart");
  app.add_option("--rel-tol", cfg->rel_tol, "eigenvalue tolerance");
  app.add_option("--out-csv", c.out, "CSV output file (default stdout)");
  return [=, &c, &out, &err] {
    const RunConfig rc = load_config(c);
    const ConvexFn phi = resolve_phi(c, rc, err);
    OptimizerConfig oc = *cfg;
    oc.threads = c.threads;
    oc.validate();
    const AsymptoticReport report = asymptotic_study(rc.coefficients, phi, *n_list, oc);
    std::vector<std::string> header{"n", "cost", "limit_cost", "gap", "w1"};
    for (int k = 0; k < 8; ++k) header.push_back(fmt::format("portion_{}", k));
    CsvWriter csv(header);
    for (const auto& r : report.rows) {
      std::vector<std::string> cells{std::to_string(r.n), format_number(r.optimal_cost),
                                     format_number(r.limit_cost), format_number(r.cost_gap),
                                     format_number(r.w1)};
      for (double p : r.portions) cells.push_back(format_number(p));
      csv.row(cells);
      if (!r.converged) err << fmt::format("warning: n = {} stopped after {} sweeps without converging\n", r.n, r.iterations);
    }
    emit(c.out, csv.str(), out);
  };
}

Handler setup_blieb(CLI::App& app, Common& c, std::ostream& out, std::ostream& err) {
  auto grid = std::make_shared<int>(99);
  auto rel_tol = std::make_shared<double>(1e-10);
  add_config(app, c);
  add_threads(app, c);
  app.add_option("--grid", *grid, "number of interior split points")->check(CLI::PositiveNumber);
  app.add_flag("--relax-q", c.relax_q, "allow negative q (outside the standing hypotheses)");
  app.add_option("--rel-tol", *rel_tol, "eigenvalue tolerance");
  app.add_option("--out-csv", c.out, "CSV output file (default stdout)");
  return [=, &c, &out, &err] {
    const RunConfig rc = load_config(c);
    const BLiebReport report = brascamp_lieb_sweep(rc.coefficients, *grid, *rel_tol, c.threads);
    CsvWriter csv({"x", "lhs", "rhs", "holds"});
    int flagged = 0;
    for (const auto& r : report.rows) {
      csv.row({format_number(r.x), format_number(r.lhs), format_number(r.rhs), r.holds ? "true" : "false"});
      flagged += r.valid ? 0 : 1;
    }
    if (flagged) err << fmt::format("warning: {} rows skipped, some eigenvalue is not positive\n", flagged);
    emit(c.out, csv.str(), out);
  };
}

}  // namespace

std::string usage() {
  return "usage: slpart <command> [options]\n"
         "\n"
         "commands:\n"
         "  eig       first Dirichlet eigenvalue on (lo, hi) with bounds\n"
         "  optimize  minimize the partition cost for n intervals\n"
         "  gamma     limit functional of a measure and the limit cost\n"
         "  recovery  cost of recovery partitions against the limit functional\n"
         "  verify    optimal partitions over a list of n against the limit\n"
         "  blieb     splitting inequality sweep over interior points\n"
         "\n"
         "run 'slpart <command> --help' for the options of a command\n";
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    (args.empty() ? err : out) << usage();
    return args.empty() ? kExitUsage : kExitOk;
  }
  const std::string& name = args[0];
  CLI::App app(fmt::format("slpart {}", name), fmt::format("slpart {}", name));
  Common common;
  Handler run;
  if (name == "eig") {
    run = setup_eig(app, common, out);
  } else if (name == "optimize") {
    run = setup_optimize(app, common, out, err);
  } else if (name == "gamma") {
    run = setup_gamma(app, common, out, err);
  } else if (name == "recovery") {
    run = setup_recovery(app, common, out, err);
  } else if (name == "verify") {
    run = setup_verify(app, common, out, err);
  } else if (name == "blieb") {
    run = setup_blieb(app, common, out, err);
  } else {
    err << fmt::format("unknown command '{}'\n\n", name) << usage();
    return kExitUsage;
  }

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 wants reverse order
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    run();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace slpart::cli
