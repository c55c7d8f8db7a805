"""Closed-form two-qubit steady states at zero temperature and zero detuning."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qubit_sr.generator import ArrayConfig, CouplingKind
from qubit_sr.opalg import DensityMatrix

__all__ = [
    "ReducedParams",
    "analytic_steady_xxyy",
    "analytic_steady_zz",
    "closed_form_steady",
    "steady_spectrum_analytic",
]


@dataclass(frozen=True)
class ReducedParams:
    """r = Gamma/Omega and s = J/Omega (or d = s_perp - s_par for XXYY)."""

    r: float
    s: float

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError(f"r = Gamma/Omega must be non-negative, got {self.r}")

    @classmethod
    def from_rates(cls, omega: float, gamma: float, j: float) -> ReducedParams:
        if omega <= 0:
            raise ValueError(f"omega must be positive, got {omega}")
        return cls(gamma / omega, j / omega)

    @property
    def t(self) -> float:
        return self.r**2 + 1

    @property
    def k(self) -> float:
        k = 3 + 2 * self.r**2 + self.t**2 + 4 * self.r**2 * self.s**2
        assert k > 0
        return k


def analytic_steady_zz(r: float, s: float) -> DensityMatrix:
    p = ReducedParams(r, s)
    t = p.t
    a = 2 * s * r**2 + 1j * r * t
    c = 2j * r * s - r**2
    m = np.array(
        [
            [t**2 + 4 * s**2 * r**2, a, a, c],
            [np.conj(a), t, r**2, 1j * r],
            [np.conj(a), r**2, t, 1j * r],
            [np.conj(c), -1j * r, -1j * r, 1],
        ],
        dtype=np.complex128,
    )
    return DensityMatrix(m / p.k, 2)


def analytic_steady_xxyy(r: float, s_perp: float, s_par: float) -> DensityMatrix:
    return analytic_steady_zz(r, s_perp - s_par)


def steady_spectrum_analytic(r: float, s: float) -> tuple[float, float, float, float]:
    """(lambda_1, lambda_2, lambda_3, lambda_4); lambda_4 is the dominant weight."""
    p = ReducedParams(r, s)
    t = p.t
    denom = 4 * r**2 * s**2 + (1 + t) ** 2
    lam_12 = 1 / denom
    centre = 1 + r**2 * (2 + 4 * s**2) + t**2
    spread = math.sqrt(4 * r**2 * (1 + s**2) + (t - 1) ** 2) * math.sqrt(denom)
    lam_3 = (centre - spread) / (2 * denom)
    lam_4 = (centre + spread) / (2 * denom)
    return lam_12, lam_12, lam_3, lam_4


def closed_form_steady(config: ArrayConfig) -> DensityMatrix:
    """Closed form for a homogeneous, decay-only, resonant, zero-temperature pair.

    The printed matrix is stationary for a sigma_z sigma_z coefficient of
    +(J_perp - J_par), so a ZZ coupling -J sigma_z sigma_z enters as d = -J/Omega.
    """
    if config.n_qubits != 2:
        raise ValueError("closed form exists for two qubits only")
    if config.coupling.kind not in (CouplingKind.ZZ, CouplingKind.XXYY):
        raise ValueError(f"no closed form for {config.coupling.kind.value} coupling")
    for name in ("omega_rabi", "gamma_decay"):
        values = getattr(config, name)
        if values[0] != values[1]:
            raise ValueError(f"closed form needs homogeneous {name}")
    if any(config.detuning) or any(config.nbar) or any(config.gamma_dephase):
        raise ValueError("closed form needs zero detuning, temperature and dephasing")
    omega = config.omega_rabi[0]
    if omega <= 0:
        raise ValueError("closed form needs a non-zero drive")
    return analytic_steady_zz(
        config.gamma_decay[0] / omega, config.coupling.anisotropy / omega
    )
