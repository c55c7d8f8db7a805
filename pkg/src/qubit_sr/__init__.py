try:
    from qubit_sr._version import __version__
except ImportError:  # pragma: no cover - source tree without a build
    __version__ = "0.0.0"

from qubit_sr.generator import (
    ArrayConfig,
    CouplingKind,
    CouplingSpec,
    build_liouvillian,
)
from qubit_sr.opalg import DensityMatrix
from qubit_sr.steady import analytic_steady_zz, solve_config, solve_steady_numeric

__all__ = [
    "ArrayConfig",
    "CouplingKind",
    "CouplingSpec",
    "DensityMatrix",
    "__version__",
    "analytic_steady_zz",
    "build_liouvillian",
    "solve_config",
    "solve_steady_numeric",
]
