from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Literal, NamedTuple

import numpy as np
import numpy.typing as npt
import scipy
import scipy.linalg as la
import scipy.sparse as sp
from packaging.version import Version
from scipy.sparse.linalg import (
    MatrixRankWarning,
    eigs,
    lgmres,
    onenormest,
    spsolve,
)

from qubit_sr.constants import (
    DENSE_SUPEROPERATOR_DIM,
    DENSE_SVD_DIM_LIMIT,
    NULL_SPACE_RTOL,
    PSD_CLIP_TOL,
    SOLVER_TOL,
)
from qubit_sr.errors import DimensionOverflow, NoConvergence, NonUniqueSteadyState
from qubit_sr.generator import ArrayConfig, Liouvillian, build_liouvillian
from qubit_sr.opalg import ComplexMatrix, DensityMatrix, unvectorize, vectorize

__all__ = [
    "SolveMethod",
    "SteadyStateReport",
    "Uniqueness",
    "check_uniqueness",
    "commutant_dimension",
    "solve_config",
    "solve_steady_numeric",
    "steady_residual",
]

logger = logging.getLogger(__name__)

# scipy 1.12 renamed the iterative solvers' `tol` keyword to `rtol`.
_RTOL_KEYWORD = "rtol" if Version(scipy.__version__) >= Version("1.12") else "tol"


class SolveMethod(str, Enum):
    NULLSPACE = "nullspace"
    LINEAR_SOLVE = "linear-solve"
    ANALYTIC = "analytic"
    PROPAGATION = "propagation"


@dataclass(frozen=True)
class SteadyStateReport:
    state: DensityMatrix
    residual: float
    null_space_dim: int
    method: SolveMethod


class Uniqueness(NamedTuple):
    unique: bool
    null_dim: int


def steady_residual(liouvillian: Liouvillian, rho: DensityMatrix | npt.ArrayLike) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else rho
    return float(np.linalg.norm(liouvillian.matrix @ vectorize(m)))


def _null_dim(singular_values: npt.NDArray[np.float64]) -> int:
    if singular_values.size == 0 or singular_values[0] == 0:
        return int(singular_values.size)
    return int(np.count_nonzero(singular_values < NULL_SPACE_RTOL * singular_values[0]))


def _physical(rho: ComplexMatrix) -> DensityMatrix:
    """Hermitize, clip solver-noise negative eigenvalues and renormalize."""
    rho = rho / np.trace(rho)
    rho = (rho + rho.conj().T) / 2
    values, vectors = la.eigh(rho)
    if values[0] < -PSD_CLIP_TOL:
        raise NoConvergence(
            float(-values[0]),
            PSD_CLIP_TOL,
            f"Steady state has a negative eigenvalue {values[0]:.3e} "
            f"below -{PSD_CLIP_TOL:.1e}",
        )
    if values[0] < 0:
        values = np.clip(values, 0, None)
        rho = (vectors * values) @ vectors.conj().T
    rho = rho / np.trace(rho).real
    n_qubits = rho.shape[0].bit_length() - 1
    return DensityMatrix((rho + rho.conj().T) / 2, n_qubits)


def _solve_nullspace(liouvillian: Liouvillian) -> tuple[ComplexMatrix, int]:
    _, singular_values, vh = la.svd(liouvillian.dense())
    null_dim = _null_dim(singular_values)
    logger.debug(
        "SVD null space: dim=%d smallest singular values %s",
        null_dim,
        singular_values[-3:],
    )
    if null_dim > 1:
        raise NonUniqueSteadyState(null_dim)
    return unvectorize(vh[-1].conj()), 1


def _trace_replaced(liouvillian: Liouvillian) -> sp.csc_matrix:
    n = liouvillian.hilbert_dim
    trace_row = sp.csr_matrix(
        (np.ones(n), (np.zeros(n, dtype=int), np.arange(n) * (n + 1))),
        shape=(1, liouvillian.dim),
    )
    return sp.vstack([trace_row, liouvillian.matrix.tocsr()[1:]], format="csc")


def _solve_linear(liouvillian: Liouvillian) -> tuple[ComplexMatrix, int]:
    system = _trace_replaced(liouvillian)
    rhs = np.zeros(liouvillian.dim, dtype=np.complex128)
    rhs[0] = 1
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            solution = spsolve(system, rhs)
        except MatrixRankWarning as exc:
            raise NonUniqueSteadyState(2) from exc
    if not np.all(np.isfinite(solution)):
        logger.info("Direct solve failed; retrying with LGMRES")
        solution, info = lgmres(system, rhs, atol=0.0, **{_RTOL_KEYWORD: 1e-13})
        if info != 0:
            raise NoConvergence(float("inf"), SOLVER_TOL)
    return unvectorize(solution), 1


def solve_steady_numeric(
    liouvillian: Liouvillian,
    *,
    method: Literal["auto", "nullspace", "linear-solve"] = "auto",
    residual_bound: float = SOLVER_TOL,
) -> SteadyStateReport:
    """Steady state of a generator with a one-dimensional null space.

    `auto` uses a dense SVD up to superoperator dimension 256 and a sparse
    solve with the first row replaced by the trace constraint above that.
    """
    config = liouvillian.config
    if config is not None and config.is_noiseless():
        raise NonUniqueSteadyState(liouvillian.hilbert_dim)

    if method == "auto":
        method = "nullspace" if liouvillian.dim <= DENSE_SUPEROPERATOR_DIM else "linear-solve"
    if method == "nullspace":
        raw, null_dim = _solve_nullspace(liouvillian)
        return _report(liouvillian, raw, null_dim, SolveMethod.NULLSPACE, residual_bound)

    try:
        raw, null_dim = _solve_linear(liouvillian)
        return _report(liouvillian, raw, null_dim, SolveMethod.LINEAR_SOLVE, residual_bound)
    except NoConvergence as exc:
        # A degenerate generator need not make the sparse LU rank deficient.
        uniqueness = check_uniqueness(liouvillian)
        if uniqueness.null_dim > 1:
            raise NonUniqueSteadyState(uniqueness.null_dim) from exc
        raise


def _report(
    liouvillian: Liouvillian,
    raw: ComplexMatrix,
    null_dim: int,
    solve_method: SolveMethod,
    residual_bound: float,
) -> SteadyStateReport:
    state = _physical(raw)
    residual = steady_residual(liouvillian, state)
    logger.debug("Steady state via %s: residual=%.3e", solve_method.value, residual)
    if residual > residual_bound:
        raise NoConvergence(residual, residual_bound)
    return SteadyStateReport(state, residual, null_dim, solve_method)


def _scale(matrix: sp.spmatrix) -> float:
    return float(onenormest(matrix.tocsc())) if matrix.nnz else 0.0


def check_uniqueness(liouvillian: Liouvillian) -> Uniqueness:
    """Null-space dimension from the singular-value gap of the generator."""
    if liouvillian.matrix.nnz == 0:
        return Uniqueness(False, liouvillian.dim)
    if liouvillian.dim <= DENSE_SVD_DIM_LIMIT:
        singular_values = la.svdvals(liouvillian.dense())
        null_dim = _null_dim(singular_values)
    else:
        # Shift-invert around zero; eigenvalue magnitudes stand in for singular values.
        scale = _scale(liouvillian.matrix)
        values = eigs(
            liouvillian.matrix.tocsc(),
            k=4,
            sigma=-1e-3 * scale,
            return_eigenvectors=False,
        )
        null_dim = int(np.count_nonzero(np.abs(values) < NULL_SPACE_RTOL * scale))
    logger.debug("Uniqueness check: null_dim=%d", null_dim)
    return Uniqueness(null_dim == 1, null_dim)


def _commutator_superoperator(op: ComplexMatrix) -> ComplexMatrix:
    eye = np.eye(op.shape[0], dtype=np.complex128)
    return np.kron(eye, op) - np.kron(op.T, eye)


def commutant_dimension(
    hamiltonian: npt.ArrayLike, jump_operators: list[ComplexMatrix]
) -> int:
    """Dimension of the operators commuting with H and every L_k, L_k^dag.

    A value of 1 together with a full-rank steady state implies uniqueness.
    """
    h = np.asarray(hamiltonian, dtype=np.complex128)
    if h.shape[0] ** 2 > DENSE_SUPEROPERATOR_DIM:
        raise DimensionOverflow("commutant_dimension is limited to four qubits")
    blocks = [_commutator_superoperator(h)]
    for jump in jump_operators:
        blocks.append(_commutator_superoperator(jump))
        blocks.append(_commutator_superoperator(jump.conj().T))
    singular_values = la.svdvals(np.vstack(blocks))
    if singular_values[0] == 0:
        return int(h.shape[0] ** 2)
    return _null_dim(singular_values)


def solve_config(
    config: ArrayConfig, *, residual_bound: float = SOLVER_TOL
) -> SteadyStateReport:
    """Build the generator for `config` and solve for its steady state."""
    return solve_steady_numeric(build_liouvillian(config), residual_bound=residual_bound)
