#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slpart/errors.hpp"
#include "slpart/experiments.hpp"
#include "slpart/gamma.hpp"
#include "slpart/optimizer.hpp"
#include "slpart/partition.hpp"
#include "slpart/phi.hpp"
#include "slpart/sl_solver.hpp"

namespace py = pybind11;
using namespace slpart;

namespace {

// str -> expression, number -> constant, sequence of (lo, hi, value) -> table.
Coefficient to_coefficient(const py::handle& obj) {
  if (py::isinstance<py::str>(obj)) return Coefficient::expression(obj.cast<std::string>());
  if (py::isinstance<py::float_>(obj) || py::isinstance<py::int_>(obj)) {
    return Coefficient::constant(obj.cast<double>());
  }
  std::vector<TableCell> cells;
  for (const auto& row : obj) {
    const auto t = row.cast<std::tuple<double, double, double>>();
    cells.push_back({std::get<0>(t), std::get<1>(t), std::get<2>(t)});
  }
  return PiecewiseTable(std::move(cells));
}

py::dict measure_dict(const MeasureRepr& mu) {
  py::list cells, atoms;
  for (const auto& c : mu.cells) cells.append(py::make_tuple(c.lo, c.hi, c.height));
  for (const auto& a : mu.atoms) atoms.append(py::make_tuple(a.x, a.mass));
  py::dict d;
  d["cells"] = cells;
  d["atoms"] = atoms;
  return d;
}

MeasureRepr measure_from(const py::dict& d) {
  MeasureRepr mu;
  if (d.contains("cells")) {
    for (const auto& row : d["cells"]) {
      const auto t = row.cast<std::tuple<double, double, double>>();
      mu.cells.push_back({std::get<0>(t), std::get<1>(t), std::get<2>(t)});
    }
  }
  if (d.contains("atoms")) {
    for (const auto& row : d["atoms"]) {
      const auto t = row.cast<std::tuple<double, double>>();
      mu.atoms.push_back({std::get<0>(t), std::get<1>(t)});
    }
  }
  return mu;
}

py::dict optimum_dict(const Optimum& o) {
  py::dict d;
  d["breakpoints"] = o.partition.breakpoints();
  d["cost"] = o.cost;
  d["lambdas"] = o.per_interval_lambdas;
  d["converged"] = o.converged;
  d["iterations"] = o.iterations;
  d["restarts_used"] = o.restarts_used;
  d["cost_log"] = o.cost_log;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "First Dirichlet eigenvalues of Sturm-Liouville operators and optimal partitions";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ValueError);

  py::class_<CoefficientSet>(m, "CoefficientSet")
      .def(py::init([](const py::object& p, const py::object& q, const py::object& w, double beta) {
             return CoefficientSet{to_coefficient(p), to_coefficient(q), to_coefficient(w), beta};
           }),
           py::arg("p"), py::arg("q"), py::arg("w"), py::arg("beta"))
      .def("s", &CoefficientSet::s, py::arg("x"))
      .def_readonly("beta", &CoefficientSet::beta)
      .def(
          "validate",
          [](const CoefficientSet& cs, bool relax_q) {
            ValidationOptions opt;
            opt.relax_q = relax_q;
            const auto r = validate(cs, opt);
            return py::make_tuple(r.ok(), r.summary());
          },
          py::arg("relax_q") = false)
      .def("__repr__", [](const CoefficientSet& cs) {
        return "CoefficientSet(p=" + cs.p.describe() + ", q=" + cs.q.describe() + ", w=" + cs.w.describe() +
               ", beta=" + std::to_string(cs.beta) + ")";
      });

  py::class_<ConvexFn>(m, "ConvexFn")
      .def_static("power", &ConvexFn::power, py::arg("r") = 1.0)
      .def_static("power_inverse", &ConvexFn::power_inverse, py::arg("r") = 1.0)
      .def_static("shifted", &ConvexFn::shifted, py::arg("a") = 1.0, py::arg("b") = 1.0)
      .def_static("heat", &ConvexFn::heat)
      .def("__call__", &ConvexFn::operator(), py::arg("t"))
      .def_property_readonly("value_at_zero", &ConvexFn::value_at_zero)
      .def_property_readonly("recession_value", &ConvexFn::recession_value)
      .def("__repr__", &ConvexFn::describe);

  m.def(
      "first_eigenvalue",
      [](const CoefficientSet& cs, double lo, double hi, double rel_tol) {
        const auto r = first_eigenvalue(Interval{lo, hi}, cs, rel_tol);
        py::dict d;
        d["lambda"] = r.lambda;
        d["error_estimate"] = r.error_estimate;
        d["grid_size"] = r.grid_size;
        return d;
      },
      py::arg("cs"), py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("rel_tol") = 1e-8);
  m.def(
      "closed_form_eigenvalue",
      [](double lo, double hi, double p, double q, double w) {
        return closed_form_eigenvalue(Interval{lo, hi}, p, q, w);
      },
      py::arg("lo"), py::arg("hi"), py::arg("p"), py::arg("q"), py::arg("w"));
  m.def(
      "eigenvalue_bounds",
      [](const CoefficientSet& cs, double lo, double hi) {
        const Interval J{lo, hi};
        const Bounds g = global_bounds(J, cs.beta);
        py::dict d;
        d["global"] = py::make_tuple(g.lo, g.hi);
        d["local"] = py::make_tuple(local_lower_bound(J, cs), local_upper_bound(J, cs));
        return d;
      },
      py::arg("cs"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);

  m.def(
      "cost",
      [](const std::vector<double>& breakpoints, const CoefficientSet& cs, const ConvexFn& phi,
         double rel_tol) { return cost_Fn(Partition(breakpoints), cs, phi, rel_tol); },
      py::arg("breakpoints"), py::arg("cs"), py::arg("phi"), py::arg("rel_tol") = 1e-8);
  m.def(
      "empirical_measure",
      [](const std::vector<double>& breakpoints) { return measure_dict(empirical_measure(Partition(breakpoints))); },
      py::arg("breakpoints"));
  m.def(
      "portion_count",
      [](const std::vector<double>& breakpoints, double lo, double hi) {
        return portion_count(Partition(breakpoints), lo, hi);
      },
      py::arg("breakpoints"), py::arg("lo"), py::arg("hi"));
  m.def(
      "wasserstein1",
      [](const py::dict& mu, const py::dict& nu) { return wasserstein1(measure_from(mu), measure_from(nu)); },
      py::arg("mu"), py::arg("nu"));

  m.def(
      "f_infinity", [](const CoefficientSet& cs, int grid) { return measure_dict(f_infinity(cs, grid)); },
      py::arg("cs"), py::arg("grid") = 256);
  m.def(
      "F_infinity",
      [](const py::dict& mu, const CoefficientSet& cs, const ConvexFn& phi) {
        return F_infinity(measure_from(mu), cs, phi);
      },
      py::arg("mu"), py::arg("cs"), py::arg("phi"));
  m.def("limit_cost", &limit_cost, py::arg("cs"), py::arg("phi"));
  m.def(
      "recovery_partition",
      [](const std::vector<double>& alphas, int n) {
        const PiecewiseConstMeasure mu{static_cast<int>(alphas.size()), alphas};
        const Recovery r = recovery_partition(mu, n);
        py::dict d;
        d["breakpoints"] = r.partition.breakpoints();
        d["k"] = r.plan.k;
        d["gammas"] = r.plan.gammas;
        d["m0"] = r.plan.m0;
        return d;
      },
      py::arg("alphas"), py::arg("n"));

  m.def(
      "optimize",
      [](const CoefficientSet& cs, const ConvexFn& phi, int n, std::uint64_t seed, int restarts, int max_iters,
         double step_tol, bool allow_empty, double rel_tol, int threads) {
        OptimizerConfig cfg;
        cfg.n = n;
        cfg.seed = seed;
        cfg.restarts = restarts;
        cfg.max_iters = max_iters;
        cfg.step_tol = step_tol;
        cfg.allow_empty = allow_empty;
        cfg.rel_tol = rel_tol;
        cfg.threads = threads;
        Optimum o = [&] {
          py::gil_scoped_release release;
          return optimize(cfg, cs, phi);
        }();
        return optimum_dict(o);
      },
      py::arg("cs"), py::arg("phi"), py::arg("n"), py::arg("seed"), py::arg("restarts") = 3,
      py::arg("max_iters") = 200, py::arg("step_tol") = 1e-7, py::arg("allow_empty") = false,
      py::arg("rel_tol") = 1e-10, py::arg("threads") = 1);
  m.def(
      "brute_force",
      [](int n, int grid, const CoefficientSet& cs, const ConvexFn& phi) {
        return optimum_dict(brute_force(n, grid, cs, phi));
      },
      py::arg("n"), py::arg("grid"), py::arg("cs"), py::arg("phi"));

  m.def(
      "brascamp_lieb_sweep",
      [](const CoefficientSet& cs, int grid, double rel_tol) {
        py::list rows;
        for (const auto& r : brascamp_lieb_sweep(cs, grid, rel_tol).rows) {
          py::dict d;
          d["x"] = r.x;
          d["lhs"] = r.lhs;
          d["rhs"] = r.rhs;
          d["holds"] = r.holds;
          d["valid"] = r.valid;
          rows.append(d);
        }
        return rows;
      },
      py::arg("cs"), py::arg("grid") = 99, py::arg("rel_tol") = 1e-10);
}
