"""Canned sweeps regenerating the data behind the published figures."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from qubit_sr import __version__
from qubit_sr.generator import ArrayConfig, CouplingSpec
from qubit_sr.sweep.config import SweepAxis, SweepSpec
from qubit_sr.sweep.runner import SweepResult, SweepRow, run_sweep, utc_timestamp
from qubit_sr.thresholds import threshold_surface

__all__ = ["FIGURES", "FigureSpec", "figure_names", "run_figure"]

logger = logging.getLogger(__name__)

# All figures are in units of Omega = 1 at the coupling J / Omega = 1.5.
OMEGA = 1.0
J_RATIO = 1.5


def _gamma_axis(count: int = 60, stop: float = 50.0) -> SweepAxis:
    return SweepAxis("gamma_decay", tuple(float(g) for g in np.geomspace(0.01, stop, count)))


def _zz_pair(n_qubits: int = 2) -> ArrayConfig:
    return ArrayConfig.homogeneous(
        n_qubits, OMEGA, OMEGA, coupling=CouplingSpec.zz(J_RATIO * OMEGA)
    )


def _fig2() -> SweepSpec:
    return SweepSpec(_zz_pair(), _gamma_axis(), measures=("eigenvalues", "eof"))


def _fig3() -> SweepSpec:
    base = ArrayConfig.homogeneous(2, OMEGA, OMEGA, coupling=CouplingSpec.xxyy(0.0, 0.0))
    anisotropy = SweepAxis("j_perp", (0.0, 1.0, 2.0, 3.0, 4.0))
    return SweepSpec(base, anisotropy, measures=("eof",), inner=_gamma_axis())


def _fig5() -> SweepSpec:
    dephasing = SweepAxis("gamma_dephase", (0.0, 0.1, 0.5))
    return SweepSpec(
        _zz_pair(), dephasing, measures=("p_z", "p_x"), inner=_gamma_axis(), site=1
    )


def _fig6() -> SweepSpec:
    dephasing = SweepAxis("gamma_dephase", tuple(float(g) for g in np.linspace(0.0, 4.5, 10)))
    return SweepSpec(_zz_pair(), _gamma_axis(20, 20.0), measures=("eof",), inner=dephasing)


def _fig7() -> SweepSpec:
    dephasing = SweepAxis("gamma_dephase", (0.0, 0.1, 0.3))
    return SweepSpec(
        _zz_pair(6),
        dephasing,
        measures=("mutual_information",),
        inner=_gamma_axis(30),
        pair=(1, 2),
    )


@dataclass(frozen=True)
class FigureSpec:
    name: str
    description: str
    build: Callable[[], SweepSpec] | None = None


FIGURES: dict[str, FigureSpec] = {
    spec.name: spec
    for spec in (
        FigureSpec("fig2", "steady-state eigenvalues and E_F versus Gamma, ZZ pair", _fig2),
        FigureSpec("fig3", "E_F versus Gamma for XXYY anisotropy |d| = 0..4", _fig3),
        FigureSpec("fig4", "entangled Gamma window versus J, gamma = 0 and gamma = Gamma"),
        FigureSpec(
            "fig5", "P_z and P_x of qubit 1 versus Gamma for gamma in {0, 0.1, 0.5}", _fig5
        ),
        FigureSpec("fig6", "E_F over the (Gamma, gamma) plane", _fig6),
        FigureSpec("fig7", "I_M of qubits 1 and 2 in a six-qubit chain versus Gamma", _fig7),
    )
}


def figure_names() -> list[str]:
    return list(FIGURES)


def _edge_row(s: float, measure: str, value: float | None) -> SweepRow:
    if value is None:
        return SweepRow((s,), measure, None, "separable")
    if math.isinf(value):
        return SweepRow((s,), measure, None, "unbounded")
    return SweepRow((s,), measure, value)


def _fig4(jobs: int | None) -> SweepResult:
    s_grid = [float(s) for s in np.linspace(0.5, 10.0, 20)]
    started = utc_timestamp()
    result = SweepResult(axes=("j",))
    surfaces = {
        policy: threshold_surface(s_grid, policy, omega=OMEGA, jobs=jobs)
        for policy in ("zero", "equal")
    }
    for i, s in enumerate(s_grid):
        for policy, points in surfaces.items():
            point = points[i]
            result.rows.append(_edge_row(s * OMEGA, f"gamma_lower_{policy}", point.lower))
            result.rows.append(_edge_row(s * OMEGA, f"gamma_upper_{policy}", point.upper))
    result.metadata = {
        "tool": "qubit-sr",
        "version": __version__,
        "started": started,
        "finished": utc_timestamp(),
        "method": "bisection",
        "points": str(len(s_grid)),
        "failures": "0",
        "config": f"two-qubit ZZ pair, omega={OMEGA}",
    }
    return result


def run_figure(name: str, *, jobs: int | None = 1) -> SweepResult:
    if name not in FIGURES:
        raise ValueError(f"Unknown figure {name!r}; expected one of {figure_names()}")
    figure = FIGURES[name]
    logger.info("Reproducing %s: %s", name, figure.description)
    if figure.build is None:
        return _fig4(jobs)
    result = run_sweep(figure.build(), jobs=jobs)
    result.metadata["figure"] = name
    return result
