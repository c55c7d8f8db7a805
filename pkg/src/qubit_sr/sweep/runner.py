from __future__ import annotations

import json
import logging
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from qubit_sr import __version__
from qubit_sr.constants import SOLVER_TOL
from qubit_sr.errors import QubitSRError
from qubit_sr.measures import (
    Bipartition,
    concurrence,
    entanglement_of_formation,
    localization_probabilities,
    mutual_information,
    negativity,
    ppt_test,
    purity,
)
from qubit_sr.opalg import DensityMatrix, hermitian_eigensystem, partial_trace
from qubit_sr.steady import SteadyStateReport, solve_config
from qubit_sr.sweep.config import SweepSpec

__all__ = [
    "SweepResult",
    "SweepRow",
    "evaluate_measures",
    "measure_columns",
    "run_sweep",
    "utc_timestamp",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRow:
    point: tuple[float, ...]
    measure: str
    value: float | None
    # Empty for a solved point, else the name of the failure.
    flag: str = ""


@dataclass
class SweepResult:
    axes: tuple[str, ...]
    rows: list[SweepRow] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def failures(self) -> list[SweepRow]:
        return [row for row in self.rows if row.flag]

    def values(self, measure: str) -> list[float | None]:
        return [row.value for row in self.rows if row.measure == measure]


def measure_columns(spec: SweepSpec) -> list[str]:
    """Row measure names in emission order; `eigenvalues` expands per level."""
    columns: list[str] = []
    for name in spec.measures:
        if name == "eigenvalues":
            columns.extend(f"eigenvalue_{i}" for i in range(1, spec.base.dim + 1))
        else:
            columns.append(name)
    return columns


def _pair_state(state: DensityMatrix, pair: tuple[int, int] | None) -> DensityMatrix:
    if state.n_qubits == 2 and pair in (None, (1, 2)):
        return state
    return partial_trace(state, pair or (1, 2))


def evaluate_measures(
    report: SteadyStateReport,
    measures: Sequence[str],
    *,
    cut: Sequence[int] = (1,),
    site: int = 1,
    pair: tuple[int, int] | None = None,
) -> list[tuple[str, float]]:
    """(name, value) pairs for `measures`, in order; `eigenvalues` expands per level."""
    state = report.state
    values: list[tuple[str, float]] = []
    for name in measures:
        match name:
            case "eof":
                values.append((name, entanglement_of_formation(_pair_state(state, pair))))
            case "concurrence":
                values.append((name, concurrence(_pair_state(state, pair))))
            case "ppt_min_eigenvalue":
                values.append((name, ppt_test(_pair_state(state, pair)).min_pt_eigenvalue))
            case "negativity":
                bipartition = Bipartition.from_sites(cut, state.n_qubits)
                values.append((name, negativity(state, bipartition)))
            case "mutual_information":
                if pair is not None:
                    reduced = _pair_state(state, pair)
                    values.append((name, mutual_information(reduced, Bipartition((1,), (2,)))))
                else:
                    bipartition = Bipartition.from_sites(cut, state.n_qubits)
                    values.append((name, mutual_information(state, bipartition)))
            case "eigenvalues":
                eigenvalues, _ = hermitian_eigensystem(state)
                values.extend(
                    (f"eigenvalue_{i}", float(v)) for i, v in enumerate(eigenvalues, 1)
                )
            case "p_z":
                values.append((name, localization_probabilities(state, site).p_z))
            case "p_x":
                values.append((name, localization_probabilities(state, site).p_x))
            case "residual":
                values.append((name, report.residual))
            case "purity":
                values.append((name, purity(state)))
            case _:
                raise ValueError(f"Unknown measure {name!r}")
    return values


def _solve_point(
    task: tuple[SweepSpec, tuple[float, ...], float],
) -> tuple[list[tuple[str, float]], str, str]:
    spec, point, residual_bound = task
    try:
        report = solve_config(spec.config_at(point), residual_bound=residual_bound)
        measured = evaluate_measures(
            report, spec.measures, cut=spec.cut, site=spec.site, pair=spec.pair
        )
    except (QubitSRError, ValueError, np.linalg.LinAlgError) as exc:
        logger.warning("Sweep point %s failed: %s", point, exc)
        return [], type(exc).__name__, ""
    if not all(np.isfinite(v) for _, v in measured):
        return [], "NonFiniteMeasure", ""
    return measured, "", report.method.value


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_sweep(
    spec: SweepSpec,
    *,
    jobs: int | None = 1,
    residual_bound: float = SOLVER_TOL,
    source: dict[str, object] | None = None,
) -> SweepResult:
    """Solve the steady state at every grid point and evaluate the requested measures.

    Points run in a process pool of `jobs` workers (None: one per CPU); rows come
    back in grid order whatever the scheduling. A point whose solve fails yields
    one flagged row per measure with an empty value.
    """
    points = spec.points()
    columns = measure_columns(spec)
    started = utc_timestamp()
    tasks = [(spec, point, residual_bound) for point in points]
    workers = jobs if jobs is not None else os.cpu_count() or 1
    logger.info("Sweeping %d points with %d worker(s)", len(points), workers)
    if workers == 1:
        outcomes = [_solve_point(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_solve_point, tasks))

    result = SweepResult(axes=spec.axis_names())
    methods: set[str] = set()
    for point, (measured, flag, method) in zip(points, outcomes):
        if flag:
            result.rows.extend(SweepRow(point, name, None, flag) for name in columns)
            continue
        methods.add(method)
        result.rows.extend(SweepRow(point, name, value) for name, value in measured)

    result.metadata = {
        "tool": "qubit-sr",
        "version": __version__,
        "started": started,
        "finished": utc_timestamp(),
        "method": ",".join(sorted(methods)) or "none",
        "points": str(len(points)),
        "failures": str(len({row.point for row in result.failures})),
        "residual_bound": f"{residual_bound:g}",
        "config": json.dumps(source, sort_keys=True, ensure_ascii=False)
        if source is not None
        else repr(spec.base),
    }
    logger.info("Sweep finished: %s failed point(s)", result.metadata["failures"])
    return result

