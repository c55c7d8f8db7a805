from __future__ import annotations

__all__ = [
    "ConfigError",
    "DimensionOverflow",
    "NoConvergence",
    "NoSignChange",
    "NonUniqueSteadyState",
    "QubitSRError",
    "StepSizeUnstable",
    "UnsupportedCoupling",
]


class QubitSRError(Exception):
    pass


class ConfigError(QubitSRError, ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class UnsupportedCoupling(QubitSRError, ValueError):
    pass


class DimensionOverflow(QubitSRError, ValueError):
    pass


class NonUniqueSteadyState(QubitSRError):
    def __init__(self, null_dim: int):
        self.null_dim = null_dim
        super().__init__(
            f"Steady state is not unique (null space dimension {null_dim}). "
            "Add a strictly positive noise rate."
        )


class NoConvergence(QubitSRError):
    def __init__(self, residual: float, bound: float, message: str | None = None):
        self.residual = residual
        super().__init__(
            message or f"Steady-state residual {residual:.3e} exceeds bound {bound:.1e}"
        )


class StepSizeUnstable(QubitSRError):
    def __init__(self, drift: float, dt: float):
        self.drift = drift
        super().__init__(
            f"Trace drifted by {drift:.3e} with dt={dt:.3e}. Reduce the step size."
        )


class NoSignChange(QubitSRError):
    pass
