"""Online learning of proper scoring rules: simulation core and experiment harness."""

from ._core import (
    SUMMARY_VERSION,
    TRACE_VERSION,
    ConfigError,
    Instance,
    InvalidInput,
    PartialOracleError,
    SolverFailure,
    compute_regret,
    fit_loglog_slope,
    grid_brute_force,
    ground_truth_oracle,
    hard_instance,
    hard_instance_offset,
    is_proper,
    max_margin_rule,
    properize,
    quadratic_rule,
    random_instance,
    run,
    solve,
    subopt,
)

__all__ = [
    "SUMMARY_VERSION",
    "TRACE_VERSION",
    "ConfigError",
    "Instance",
    "InvalidInput",
    "PartialOracleError",
    "SolverFailure",
    "compute_regret",
    "fit_loglog_slope",
    "grid_brute_force",
    "ground_truth_oracle",
    "hard_instance",
    "hard_instance_offset",
    "is_proper",
    "max_margin_rule",
    "properize",
    "quadratic_rule",
    "random_instance",
    "run",
    "solve",
    "subopt",
]
