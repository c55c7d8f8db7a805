from __future__ import annotations

import numpy as np

from qubit_sr.opalg import ComplexMatrix, DensityMatrix


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> DensityMatrix:
    """Full-rank state from a complex Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix.from_matrix(rho / np.trace(rho))


def random_unitary(rng: np.random.Generator, dim: int = 2) -> ComplexMatrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return np.asarray(q * (np.diag(r) / np.abs(np.diag(r))), dtype=np.complex128)
