"""Separability thresholds: closed forms, the combined-noise approximation and scans."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
from scipy.optimize import bisect

from qubit_sr.constants import ENTANGLEMENT_DEAD_BAND, UPPER_EDGE_SEARCH_FACTOR
from qubit_sr.errors import NoSignChange
from qubit_sr.generator import ArrayConfig, ConfigFamily, CouplingSpec
from qubit_sr.measures import ppt_test
from qubit_sr.steady import solve_config

__all__ = [
    "DEFAULT_GAMMA_GRID",
    "GammaPolicy",
    "SurfacePoint",
    "ThresholdMethod",
    "ThresholdResult",
    "approx_combined_threshold",
    "approx_combined_window",
    "entangled_window",
    "entanglement_margin",
    "is_entangled",
    "scan_threshold_bisection",
    "threshold_surface",
    "threshold_xxyy",
    "threshold_zz",
]

logger = logging.getLogger(__name__)

GammaPolicy = Literal["zero", "equal", "fixed"]

# Gamma / Omega grid used to locate windows before bisecting their edges.
DEFAULT_GAMMA_GRID: tuple[float, ...] = tuple(float(x) for x in np.logspace(-2, 1.5, 60))


class ThresholdMethod(str, Enum):
    ANALYTIC = "analytic"
    APPROXIMATE = "approximate"
    BISECTION = "bisection"


@dataclass(frozen=True)
class ThresholdResult:
    """Entangled for lower < value < upper.

    `lower` is None when no entangled point was found; `upper` is infinite when
    no upper edge exists in the searched range.
    """

    lower: float | None
    upper: float
    method: ThresholdMethod
    tolerance: float

    def __post_init__(self) -> None:
        if self.lower is not None and not self.lower < self.upper:
            raise ValueError(f"lower edge {self.lower} is not below upper edge {self.upper}")

    @property
    def entangled(self) -> bool:
        return self.lower is not None


def threshold_zz(omega: float, j: float) -> float:
    """Omega^2 / (2 |J|); infinite for an uncoupled pair."""
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if j == 0:
        return math.inf
    return omega**2 / (2 * abs(j))


def threshold_xxyy(omega: float, j_perp: float, j_par: float) -> float:
    return threshold_zz(omega, j_perp - j_par)


def approx_combined_threshold(r: float) -> float:
    """Coupling s = J/Omega on the approximate gamma = Gamma boundary at r = Gamma/Omega."""
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    return 1 / (2 * r) + (32 * r + 2) / 5


def approx_combined_window(s: float) -> tuple[float, float] | None:
    """r-window of entanglement at gamma = Gamma, or None below the discriminant root."""
    if s <= 0:
        return None
    discriminant = 25 * s**2 - 20 * s - 316
    if discriminant < 0:
        return None
    centre = -1 / 32 + 5 * s / 64
    half_width = math.sqrt(discriminant) / 64
    return centre - half_width, centre + half_width


def entanglement_margin(config: ArrayConfig) -> float:
    """Negated lowest partial-transpose eigenvalue of the steady state, less the dead band.

    Positive exactly when the two-qubit steady state is entangled. For two qubits
    the sign agrees with that of the concurrence while avoiding its square roots.
    """
    state = solve_config(config).state
    return -ppt_test(state).min_pt_eigenvalue - ENTANGLEMENT_DEAD_BAND


def is_entangled(config: ArrayConfig) -> bool:
    return entanglement_margin(config) > 0


def _edge(family: ConfigFamily, lo: float, hi: float, tol: float) -> float:
    def margin(value: float) -> float:
        return entanglement_margin(family(value))

    return float(bisect(margin, lo, hi, xtol=tol))


def scan_threshold_bisection(
    family: ConfigFamily, bracket: tuple[float, float], tol: float = 1e-6
) -> ThresholdResult:
    """Locate the entanglement boundary of `family` inside `bracket`.

    A separable-to-entangled crossing is reported as the lower edge with an open
    upper end; an entangled-to-separable crossing as the upper edge, with the
    bracket start as the lower end.
    """
    lo, hi = bracket
    if not 0 <= lo < hi:
        raise NoSignChange(f"Invalid bracket {bracket}")
    if family(lo).is_noiseless():
        raise NoSignChange(
            f"Invalid bracket {bracket}: no noise at {lo}, steady state not unique"
        )
    entangled_lo = is_entangled(family(lo))
    entangled_hi = is_entangled(family(hi))
    if entangled_lo == entangled_hi:
        state = "entangled" if entangled_lo else "separable"
        raise NoSignChange(f"Steady state is {state} at both ends of {bracket}")
    edge = _edge(family, lo, hi, tol)
    logger.debug("Bisection on %s in %s: edge at %.9g", family.axis, bracket, edge)
    if entangled_hi:
        return ThresholdResult(edge, math.inf, ThresholdMethod.BISECTION, tol)
    return ThresholdResult(lo, edge, ThresholdMethod.BISECTION, tol)


def _has_dephasing(family: ConfigFamily) -> bool:
    return family.tie_dephasing or any(family.base.gamma_dephase)


def entangled_window(
    family: ConfigFamily,
    grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    tol: float = 1e-6,
) -> ThresholdResult:
    """First entangled interval along `grid`, with both edges bisected to `tol`.

    Past the end of the grid an upper edge is searched up to 100 Omega, and only
    when dephasing is present; without it entanglement persists at any decay rate.
    """
    points = sorted(float(x) for x in grid)
    flags = [is_entangled(family(x)) for x in points]
    if not any(flags):
        return ThresholdResult(None, math.inf, ThresholdMethod.BISECTION, tol)

    first = flags.index(True)
    lower = points[0] if first == 0 else _edge(family, points[first - 1], points[first], tol)

    upper = math.inf
    after = [i for i in range(first + 1, len(points)) if not flags[i]]
    if after:
        upper = _edge(family, points[after[0] - 1], points[after[0]], tol)
    elif _has_dephasing(family):
        omega = max(family.base.omega_rabi) or 1.0
        far = UPPER_EDGE_SEARCH_FACTOR * omega
        if far > points[-1] and not is_entangled(family(far)):
            upper = _edge(family, points[-1], far, tol)
    return ThresholdResult(lower, upper, ThresholdMethod.BISECTION, tol)


@dataclass(frozen=True)
class SurfacePoint:
    s: float
    lower: float | None
    upper: float


def _policy_family(
    s: float, policy: GammaPolicy, omega: float, gamma_fixed: float
) -> ConfigFamily:
    base = ArrayConfig.homogeneous(
        2,
        omega,
        omega,
        gamma_dephase=gamma_fixed if policy == "fixed" else 0.0,
        coupling=CouplingSpec.zz(s * omega),
    )
    return ConfigFamily(base, "gamma_decay", tie_dephasing=policy == "equal")


def _surface_point(
    args: tuple[float, GammaPolicy, float, float, tuple[float, ...], float],
) -> SurfacePoint:
    s, policy, omega, gamma_fixed, grid, tol = args
    family = _policy_family(s, policy, omega, gamma_fixed)
    window = entangled_window(family, [g * omega for g in grid], tol)
    return SurfacePoint(s, window.lower, window.upper)


def threshold_surface(
    s_grid: Sequence[float],
    gamma_policy: GammaPolicy = "zero",
    *,
    omega: float = 1.0,
    gamma_fixed: float = 0.0,
    grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    tol: float = 1e-6,
    jobs: int | None = 1,
) -> list[SurfacePoint]:
    """Entangled Gamma-window for each coupling s = J/Omega.

    `gamma_policy` fixes the dephasing rate along each scan: zero, equal to the
    decay rate, or the constant `gamma_fixed`. Points run in a process pool when
    `jobs` is not 1.
    """
    if gamma_policy not in ("zero", "equal", "fixed"):
        raise ValueError(f"Unknown gamma policy {gamma_policy!r}")
    tasks = [
        (float(s), gamma_policy, omega, gamma_fixed, tuple(grid), tol) for s in s_grid
    ]
    if jobs == 1:
        points = [_surface_point(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(_surface_point, tasks))
    logger.info("Threshold surface: %d couplings, policy %s", len(points), gamma_policy)
    return points
