from __future__ import annotations

from qubit_sr.steady.analytic import (
    ReducedParams,
    analytic_steady_xxyy,
    analytic_steady_zz,
    closed_form_steady,
    steady_spectrum_analytic,
)
from qubit_sr.steady.numeric import (
    SolveMethod,
    SteadyStateReport,
    Uniqueness,
    check_uniqueness,
    commutant_dimension,
    solve_config,
    solve_steady_numeric,
    steady_residual,
)
from qubit_sr.steady.propagate import (
    PropagationResult,
    default_time_step,
    propagate_to_steady,
)

__all__ = [
    "PropagationResult",
    "ReducedParams",
    "SolveMethod",
    "SteadyStateReport",
    "Uniqueness",
    "analytic_steady_xxyy",
    "analytic_steady_zz",
    "check_uniqueness",
    "closed_form_steady",
    "commutant_dimension",
    "default_time_step",
    "propagate_to_steady",
    "solve_config",
    "solve_steady_numeric",
    "steady_residual",
    "steady_spectrum_analytic",
]
