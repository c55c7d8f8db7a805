"""Dense operator algebra on qubit registers.

Site 1 is the leftmost (most significant) tensor factor and index 0 of every
qubit is the sigma_z = +1 (ground) state.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import reduce
from typing import TypeAlias

import numpy as np
import numpy.typing as npt
import scipy.linalg as la

from qubit_sr.constants import (
    FORMULA_TOL,
    HERMITIAN_TOL,
    MAX_QUBITS,
    PSD_CLIP_TOL,
)

__all__ = [
    "IDENTITY_2",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "ComplexMatrix",
    "DensityMatrix",
    "RealVector",
    "as_complex_matrix",
    "embed_local",
    "hermitian_eigensystem",
    "partial_trace",
    "partial_transpose",
    "tensor",
    "tensor_product",
    "unvectorize",
    "vectorize",
]

ComplexMatrix: TypeAlias = npt.NDArray[np.complex128]
RealVector: TypeAlias = npt.NDArray[np.float64]


def _frozen(rows: list[list[complex]]) -> ComplexMatrix:
    arr = np.array(rows, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


IDENTITY_2 = _frozen([[1, 0], [0, 1]])
SIGMA_X = _frozen([[0, 1], [1, 0]])
SIGMA_Y = _frozen([[0, -1j], [1j, 0]])
SIGMA_Z = _frozen([[1, 0], [0, -1]])
# sigma_minus annihilates the ground state |0>; sigma_plus sigma_minus = diag(0, 1).
SIGMA_MINUS = _frozen([[0, 1], [0, 0]])
SIGMA_PLUS = _frozen([[0, 0], [1, 0]])


def as_complex_matrix(m: npt.ArrayLike) -> ComplexMatrix:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("Expected a non-empty matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Matrix contains NaN or Inf entries")
    return arr


def _qubit_count(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"Dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class DensityMatrix:
    matrix: ComplexMatrix
    n_qubits: int

    def __post_init__(self) -> None:
        arr = as_complex_matrix(self.matrix).copy()
        if self.n_qubits < 1 or arr.shape[0] != 2**self.n_qubits:
            raise ValueError(
                f"Matrix of dimension {arr.shape[0]} does not describe "
                f"{self.n_qubits} qubits"
            )
        trace = np.trace(arr)
        if abs(trace - 1) > FORMULA_TOL:
            raise ValueError(f"Density matrix trace is {trace}, expected 1")
        asym = float(np.max(np.abs(arr - arr.conj().T)))
        if asym > FORMULA_TOL:
            raise ValueError(f"Density matrix is not Hermitian (deviation {asym:.2e})")
        min_eig = float(np.linalg.eigvalsh(arr)[0])
        if min_eig < -PSD_CLIP_TOL:
            raise ValueError(
                f"Density matrix is not positive semidefinite (eigenvalue {min_eig:.2e})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @classmethod
    def from_matrix(cls, m: npt.ArrayLike) -> DensityMatrix:
        arr = as_complex_matrix(m)
        return cls(arr, _qubit_count(arr.shape[0]))

    @classmethod
    def from_ket(cls, psi: npt.ArrayLike) -> DensityMatrix:
        vec = np.asarray(psi, dtype=np.complex128).ravel()
        vec = vec / np.linalg.norm(vec)
        return cls.from_matrix(np.outer(vec, vec.conj()))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> DensityMatrix:
        dim = 2**n_qubits
        return cls(np.eye(dim, dtype=np.complex128) / dim, n_qubits)

    @classmethod
    def ground(cls, n_qubits: int) -> DensityMatrix:
        dim = 2**n_qubits
        rho = np.zeros((dim, dim), dtype=np.complex128)
        rho[0, 0] = 1
        return cls(rho, n_qubits)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def tensor_product(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def tensor(*ops: npt.ArrayLike) -> ComplexMatrix:
    if not ops:
        raise ValueError("tensor() needs at least one operator")
    return reduce(tensor_product, ops[1:], as_complex_matrix(ops[0]))


def _check_site(site: int, n_qubits: int) -> None:
    if not 1 <= site <= n_qubits:
        raise ValueError(f"Site {site} out of range [1, {n_qubits}]")


def embed_local(op: npt.ArrayLike, site: int, n_qubits: int) -> ComplexMatrix:
    local = as_complex_matrix(op)
    if local.shape != (2, 2):
        raise ValueError(f"Local operator must be 2x2, got {local.shape}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    _check_site(site, n_qubits)
    left = np.eye(2 ** (site - 1), dtype=np.complex128)
    right = np.eye(2 ** (n_qubits - site), dtype=np.complex128)
    return np.kron(np.kron(left, local), right)


def _matrix_of(m: DensityMatrix | npt.ArrayLike) -> ComplexMatrix:
    if isinstance(m, DensityMatrix):
        return m.matrix
    return as_complex_matrix(m)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on `keep` (1-based sites, in the order given)."""
    kept = list(keep)
    n = rho.n_qubits
    if not kept:
        raise ValueError("partial_trace needs at least one site to keep")
    if len(set(kept)) != len(kept):
        raise ValueError(f"Duplicate sites in {kept}")
    for site in kept:
        _check_site(site, n)

    traced = [s for s in range(1, n + 1) if s not in kept]
    order = [s - 1 for s in kept + traced]
    t = rho.matrix.reshape((2,) * (2 * n))
    t = t.transpose(order + [n + i for i in order])
    d_keep, d_trace = 2 ** len(kept), 2 ** len(traced)
    reduced = np.einsum("ajbj->ab", t.reshape(d_keep, d_trace, d_keep, d_trace))
    return DensityMatrix(reduced, len(kept))


def partial_transpose(
    rho: DensityMatrix | npt.ArrayLike, site: int | Sequence[int]
) -> ComplexMatrix:
    m = _matrix_of(rho)
    n = _qubit_count(m.shape[0])
    sites = [site] if isinstance(site, int) else list(site)
    for s in sites:
        _check_site(s, n)
    t = m.reshape((2,) * (2 * n))
    for s in sites:
        t = t.swapaxes(s - 1, n + s - 1)
    return np.ascontiguousarray(t.reshape(m.shape))


def hermitian_eigensystem(
    m: DensityMatrix | npt.ArrayLike,
) -> tuple[RealVector, ComplexMatrix]:
    """Ascending eigenvalues and orthonormal eigenvector columns."""
    arr = _matrix_of(m)
    asym = float(np.max(np.abs(arr - arr.conj().T)))
    if asym > HERMITIAN_TOL:
        raise ValueError(f"Matrix is not Hermitian (deviation {asym:.2e})")
    values, vectors = la.eigh((arr + arr.conj().T) / 2)
    return np.asarray(values, dtype=np.float64), np.asarray(vectors, dtype=np.complex128)


def vectorize(m: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """Column-stacked vec(m)."""
    return np.asarray(m, dtype=np.complex128).reshape(-1, order="F")


def unvectorize(v: npt.ArrayLike) -> ComplexMatrix:
    flat = np.asarray(v, dtype=np.complex128).ravel()
    dim = int(round(np.sqrt(flat.size)))
    if dim * dim != flat.size:
        raise ValueError(f"Vector of length {flat.size} is not a vectorized square matrix")
    return flat.reshape((dim, dim), order="F")
