"""First Dirichlet eigenvalues of 1-D Sturm-Liouville operators, optimal
partitions of the unit interval and their limiting density."""

from ._core import (
    CoefficientSet,
    ConfigError,
    ConvexFn,
    EvalError,
    F_infinity,
    ParseError,
    QuadratureError,
    SolverError,
    brascamp_lieb_sweep,
    brute_force,
    closed_form_eigenvalue,
    cost,
    eigenvalue_bounds,
    empirical_measure,
    f_infinity,
    first_eigenvalue,
    limit_cost,
    optimize,
    portion_count,
    recovery_partition,
    wasserstein1,
)

__all__ = [
    "CoefficientSet",
    "ConfigError",
    "ConvexFn",
    "EvalError",
    "F_infinity",
    "ParseError",
    "QuadratureError",
    "SolverError",
    "brascamp_lieb_sweep",
    "brute_force",
    "closed_form_eigenvalue",
    "cost",
    "eigenvalue_bounds",
    "empirical_measure",
    "f_infinity",
    "first_eigenvalue",
    "limit_cost",
    "optimize",
    "portion_count",
    "recovery_partition",
    "wasserstein1",
]
