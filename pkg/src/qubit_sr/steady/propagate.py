"""Fixed-step time evolution used as an independent steady-state oracle."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg as la
from scipy.sparse.linalg import onenormest

from qubit_sr.constants import (
    DENSE_SUPEROPERATOR_DIM,
    PROPAGATION_CONVERGENCE_TOL,
    TRACE_DRIFT_TOL,
)
from qubit_sr.errors import StepSizeUnstable
from qubit_sr.generator import Liouvillian
from qubit_sr.opalg import DensityMatrix, unvectorize, vectorize

__all__ = ["PropagationResult", "default_time_step", "propagate_to_steady"]

logger = logging.getLogger(__name__)

# Steps between convergence and drift checks.
WINDOW_STEPS = 100

Vector = npt.NDArray[np.complex128]


@dataclass(frozen=True)
class PropagationResult:
    state: DensityMatrix
    residual: float
    time: float
    converged: bool


def default_time_step(liouvillian: Liouvillian) -> float:
    """0.01 over the generator scale (bounds both total rate and ||H_coh||)."""
    if liouvillian.matrix.nnz == 0:
        return 1.0
    return 0.01 / float(onenormest(liouvillian.matrix.tocsc()))


def _rk4_step(liouvillian: Liouvillian, v: Vector, dt: float) -> Vector:
    m = liouvillian.matrix
    k1 = m @ v
    k2 = m @ (v + 0.5 * dt * k1)
    k3 = m @ (v + 0.5 * dt * k2)
    k4 = m @ (v + dt * k3)
    return np.asarray(v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4), dtype=np.complex128)


def _check_drift(v: Vector, dt: float) -> None:
    if not np.all(np.isfinite(v)):
        raise StepSizeUnstable(math.inf, dt)
    rho = unvectorize(v)
    drift = float(abs(np.trace(rho) - 1))
    # Trace is conserved even by an unstable scheme; a purity above one is not.
    growth = float(np.linalg.norm(rho)) - 1
    worst = max(drift, growth)
    if worst > TRACE_DRIFT_TOL:
        raise StepSizeUnstable(worst, dt)


def propagate_to_steady(
    liouvillian: Liouvillian,
    rho0: DensityMatrix,
    t_max: float,
    dt: float | None = None,
) -> PropagationResult:
    """Integrate d vec(rho)/dt = L vec(rho) from rho0 until t_max or convergence.

    Generators up to dimension 256 are stepped with the exact propagator
    expm(L dt); larger ones with classical fourth-order Runge-Kutta.
    """
    if rho0.dim != liouvillian.hilbert_dim:
        raise ValueError(
            f"Initial state has dimension {rho0.dim}, generator expects "
            f"{liouvillian.hilbert_dim}"
        )
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if liouvillian.matrix.nnz == 0:
        return PropagationResult(rho0, 0.0, 0.0, converged=True)

    step = default_time_step(liouvillian) if dt is None else dt
    if step <= 0:
        raise ValueError(f"dt must be positive, got {step}")

    window = WINDOW_STEPS * step
    v = vectorize(rho0.matrix)
    if liouvillian.dim <= DENSE_SUPEROPERATOR_DIM:
        propagator = la.expm(liouvillian.dense() * window)

        def advance(x: Vector) -> Vector:
            return np.asarray(propagator @ x, dtype=np.complex128)
    else:

        def advance(x: Vector) -> Vector:
            for _ in range(WINDOW_STEPS):
                x = _rk4_step(liouvillian, x, step)
            return x

    t, converged = 0.0, False
    while t < t_max:
        nxt = advance(v)
        t += window
        _check_drift(nxt, step)
        change = float(np.linalg.norm(nxt - v))
        v = nxt
        if change < PROPAGATION_CONVERGENCE_TOL:
            converged = True
            break

    rho = unvectorize(v)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    state = DensityMatrix(rho, rho0.n_qubits)
    residual = float(np.linalg.norm(liouvillian.matrix @ vectorize(state.matrix)))
    logger.debug(
        "Propagated to t=%.3g (converged=%s): residual=%.3e", t, converged, residual
    )
    return PropagationResult(state, residual, t, converged)
