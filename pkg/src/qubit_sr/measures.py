"""Entropies, correlations and entanglement of steady states."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
import scipy.linalg as la
from scipy.special import entr

from qubit_sr.constants import ENTANGLEMENT_DEAD_BAND, ENTROPY_FLOOR
from qubit_sr.generator import ConfigFamily
from qubit_sr.opalg import (
    SIGMA_Y,
    DensityMatrix,
    RealVector,
    hermitian_eigensystem,
    partial_trace,
    partial_transpose,
)
from qubit_sr.steady import solve_config

__all__ = [
    "Bipartition",
    "Localization",
    "PPTResult",
    "binary_entropy",
    "concurrence",
    "concurrence_margin",
    "eof_from_concurrence",
    "entanglement_of_formation",
    "ground_state_fidelity",
    "localization_probabilities",
    "mutual_information",
    "negativity",
    "ppt_test",
    "purity",
    "steady_entanglement_curve",
    "von_neumann_entropy",
]

logger = logging.getLogger(__name__)

_SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


def _entropy_bits(probabilities: RealVector) -> float:
    if np.any(probabilities < -ENTROPY_FLOOR):
        raise ValueError(
            f"Negative eigenvalue {probabilities.min():.2e} below the entropy floor"
        )
    return float(np.sum(entr(np.clip(probabilities, 0.0, None))) / math.log(2))


def binary_entropy(x: float) -> float:
    """-x log2 x - (1 - x) log2 (1 - x), with 0 log 0 = 0."""
    if not 0 <= x <= 1:
        raise ValueError(f"binary_entropy needs x in [0, 1], got {x}")
    return _entropy_bits(np.array([x, 1 - x]))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits."""
    values, _ = hermitian_eigensystem(rho)
    return _entropy_bits(values)


@dataclass(frozen=True)
class Bipartition:
    part_a: tuple[int, ...]
    part_b: tuple[int, ...]

    def __post_init__(self) -> None:
        a, b = set(self.part_a), set(self.part_b)
        if not a or not b:
            raise ValueError("Both sides of a bipartition must be non-empty")
        if a & b:
            raise ValueError(f"Bipartition sides overlap on sites {sorted(a & b)}")
        sites = a | b
        if sites != set(range(1, len(sites) + 1)):
            raise ValueError(f"Bipartition does not cover sites 1..{len(sites)}")

    @classmethod
    def from_sites(cls, part_a: Iterable[int], n_qubits: int) -> Bipartition:
        """Part A as given, part B its complement in 1..n_qubits."""
        a = tuple(sorted(set(part_a)))
        if any(not 1 <= s <= n_qubits for s in a):
            raise ValueError(f"Sites {a} out of range [1, {n_qubits}]")
        b = tuple(s for s in range(1, n_qubits + 1) if s not in a)
        return cls(a, b)

    @property
    def n_qubits(self) -> int:
        return len(self.part_a) + len(self.part_b)


def _check_cut(rho: DensityMatrix, cut: Bipartition) -> None:
    if cut.n_qubits != rho.n_qubits:
        raise ValueError(
            f"Bipartition covers {cut.n_qubits} sites, state has {rho.n_qubits}"
        )


def mutual_information(rho: DensityMatrix, cut: Bipartition) -> float:
    """S(rho_A) + S(rho_B) - S(rho_AB) in bits."""
    _check_cut(rho, cut)
    s_a = von_neumann_entropy(partial_trace(rho, cut.part_a))
    s_b = von_neumann_entropy(partial_trace(rho, cut.part_b))
    return max(0.0, s_a + s_b - von_neumann_entropy(rho))


def _require_two_qubits(rho: DensityMatrix, what: str) -> None:
    if rho.n_qubits != 2:
        raise ValueError(f"{what} is defined for two qubits, got {rho.n_qubits}")


def _sqrt_psd(m: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    values, vectors = la.eigh(m)
    return np.asarray(
        (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T,
        dtype=np.complex128,
    )


def concurrence_margin(rho: DensityMatrix) -> float:
    """mu_1 - mu_2 - mu_3 - mu_4 before clipping at zero.

    The mu_i are square roots of the eigenvalues of rho (sy sy) rho* (sy sy),
    obtained from the Hermitian form sqrt(rho) rho_tilde sqrt(rho).
    """
    _require_two_qubits(rho, "concurrence")
    root = _sqrt_psd(rho.matrix)
    flipped = _SIGMA_YY @ rho.matrix.conj() @ _SIGMA_YY
    product = root @ flipped @ root
    values = la.eigvalsh((product + product.conj().T) / 2)
    mu = np.sort(np.sqrt(np.clip(values, 0.0, None)))[::-1]
    return float(mu[0] - mu[1] - mu[2] - mu[3])


def concurrence(rho: DensityMatrix) -> float:
    return float(np.clip(concurrence_margin(rho), 0.0, 1.0))


def eof_from_concurrence(c: float) -> float:
    if not 0 <= c <= 1:
        raise ValueError(f"Concurrence must lie in [0, 1], got {c}")
    return binary_entropy((1 + math.sqrt(1 - c * c)) / 2)


def entanglement_of_formation(rho: DensityMatrix) -> float:
    """Closed-form two-qubit entanglement of formation in ebits."""
    return eof_from_concurrence(concurrence(rho))


class PPTResult(NamedTuple):
    entangled: bool
    min_pt_eigenvalue: float


def _pt_eigenvalues(rho: DensityMatrix, sites: Sequence[int]) -> RealVector:
    values, _ = hermitian_eigensystem(partial_transpose(rho, list(sites)))
    return values


def ppt_test(rho: DensityMatrix) -> PPTResult:
    _require_two_qubits(rho, "ppt_test")
    lowest = float(_pt_eigenvalues(rho, [2])[0])
    return PPTResult(lowest < -ENTANGLEMENT_DEAD_BAND, lowest)


def negativity(rho: DensityMatrix, cut: Bipartition | None = None) -> float:
    """Sum of |negative eigenvalues| of the partial transpose on part A."""
    if cut is None:
        cut = Bipartition.from_sites([1], rho.n_qubits)
    _check_cut(rho, cut)
    values = _pt_eigenvalues(rho, cut.part_a)
    return float(-np.sum(values[values < -ENTANGLEMENT_DEAD_BAND]))


class Localization(NamedTuple):
    p_z: float
    p_x: float


def localization_probabilities(rho: DensityMatrix, site: int) -> Localization:
    """Largest overlap of qubit `site` with a sigma_z and a sigma_x eigenstate."""
    local = partial_trace(rho, [site]).matrix
    p_z = max(local[0, 0].real, local[1, 1].real)
    p_x = 0.5 + abs(local[0, 1].real)
    return Localization(float(p_z), float(min(p_x, 1.0)))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.vdot(rho.matrix, rho.matrix)))


def ground_state_fidelity(rho: DensityMatrix) -> float:
    """Weight of the product ground state in the dominant eigenvector."""
    _, vectors = hermitian_eigensystem(rho)
    return float(abs(vectors[0, -1]) ** 2)


def steady_entanglement_curve(
    family: ConfigFamily, grid: Iterable[float]
) -> list[tuple[float, float]]:
    """(value, E_F) of the two-qubit steady state along a one-parameter family."""
    curve = []
    for value in grid:
        state = solve_config(family(value)).state
        curve.append((float(value), entanglement_of_formation(state)))
    logger.debug("Entanglement curve over %d points along %s", len(curve), family.axis)
    return curve
