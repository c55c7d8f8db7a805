from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from qubit_sr.constants import FORMULA_TOL, MAX_QUBITS, REGIME_RATIO_LIMIT
from qubit_sr.errors import ConfigError, DimensionOverflow, UnsupportedCoupling
from qubit_sr.opalg import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ComplexMatrix,
    embed_local,
    unvectorize,
    vectorize,
)

__all__ = [
    "PARAMETER_NAMES",
    "ArrayConfig",
    "ConfigFamily",
    "CouplingKind",
    "CouplingSpec",
    "Liouvillian",
    "RegimeWarning",
    "apply_liouvillian",
    "build_coherent_hamiltonian",
    "build_effective_hamiltonian",
    "build_jump_operators",
    "build_liouvillian",
    "build_liouvillian_standard",
    "nbar_from_temperature",
    "validate_regime",
]

logger = logging.getLogger(__name__)

SparseMatrix = sp.csr_matrix

# Names accepted by ArrayConfig.with_parameter (and therefore by sweep axes).
PARAMETER_NAMES = (
    "omega",
    "gamma_decay",
    "gamma_dephase",
    "nbar",
    "detuning",
    "j",
    "j_perp",
    "j_par",
)

_RATE_FIELDS = ("omega_rabi", "detuning", "gamma_decay", "gamma_dephase", "nbar")
_NON_NEGATIVE = ("omega_rabi", "gamma_decay", "gamma_dephase", "nbar")


class CouplingKind(str, Enum):
    ZZ = "ZZ"
    XXYY = "XXYY"
    XYZ = "XYZ"


@dataclass(frozen=True)
class CouplingSpec:
    """Nearest-neighbour coupling.

    ZZ uses `j_parallel` only. XXYY reads `j_perp` as J_perp and `j_parallel` as
    J_par. XYZ carries J_x in `j_perp`, J_y in `j_y` and J_z in `j_parallel`; it
    is only buildable when J_x == J_y, where it reduces to XXYY.
    """

    kind: CouplingKind = CouplingKind.ZZ
    j_parallel: float = 0.0
    j_perp: float = 0.0
    j_y: float | None = None

    @classmethod
    def zz(cls, j: float) -> CouplingSpec:
        return cls(CouplingKind.ZZ, j_parallel=float(j))

    @classmethod
    def xxyy(cls, j_perp: float, j_par: float) -> CouplingSpec:
        return cls(CouplingKind.XXYY, j_parallel=float(j_par), j_perp=float(j_perp))

    @classmethod
    def heisenberg(cls, jx: float, jy: float, jz: float) -> CouplingSpec:
        return cls(CouplingKind.XYZ, j_parallel=float(jz), j_perp=float(jx), j_y=float(jy))

    @property
    def anisotropy(self) -> float:
        """J_perp - J_par: the coupling entering the two-qubit closed form."""
        if self.kind is CouplingKind.ZZ:
            return -self.j_parallel
        return self.j_perp - self.j_parallel

    def couplings(self) -> list[float]:
        if self.kind is CouplingKind.ZZ:
            return [self.j_parallel]
        if self.kind is CouplingKind.XYZ and self.j_y is not None:
            return [self.j_perp, self.j_y, self.j_parallel]
        return [self.j_perp, self.j_parallel]


def _as_rates(name: str, values: float | Sequence[float], n: int) -> tuple[float, ...]:
    if isinstance(values, (int, float)):
        return (float(values),) * n
    rates = tuple(float(v) for v in values)
    if len(rates) != n:
        raise ConfigError(name, f"expected {n} values, got {len(rates)}")
    return rates


@dataclass(frozen=True)
class ArrayConfig:
    n_qubits: int
    omega_rabi: tuple[float, ...]
    detuning: tuple[float, ...]
    gamma_decay: tuple[float, ...]
    gamma_dephase: tuple[float, ...]
    nbar: tuple[float, ...]
    coupling: CouplingSpec = field(default_factory=CouplingSpec)

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ConfigError("n_qubits", f"must be >= 1, got {self.n_qubits}")
        for name in _RATE_FIELDS:
            rates = _as_rates(name, getattr(self, name), self.n_qubits)
            for i, value in enumerate(rates):
                if not math.isfinite(value):
                    raise ConfigError(f"{name}[{i}]", "must be finite")
                if name in _NON_NEGATIVE and value < 0:
                    raise ConfigError(f"{name}[{i}]", f"must be non-negative, got {value}")
            object.__setattr__(self, name, rates)
        for value in self.coupling.couplings():
            if not math.isfinite(value):
                raise ConfigError("coupling", "coupling strengths must be finite")

    @classmethod
    def homogeneous(
        cls,
        n_qubits: int,
        omega: float,
        gamma_decay: float,
        *,
        gamma_dephase: float = 0.0,
        coupling: CouplingSpec | None = None,
        detuning: float = 0.0,
        nbar: float = 0.0,
    ) -> ArrayConfig:
        """Identical drive and noise on every site."""
        return cls(
            n_qubits=n_qubits,
            omega_rabi=(float(omega),) * n_qubits,
            detuning=(float(detuning),) * n_qubits,
            gamma_decay=(float(gamma_decay),) * n_qubits,
            gamma_dephase=(float(gamma_dephase),) * n_qubits,
            nbar=(float(nbar),) * n_qubits,
            coupling=coupling or CouplingSpec(),
        )

    @property
    def dim(self) -> int:
        return int(2**self.n_qubits)

    def with_parameter(self, name: str, value: float) -> ArrayConfig:
        """Copy with one parameter set uniformly across sites."""
        uniform = (float(value),) * self.n_qubits
        match name:
            case "omega":
                return replace(self, omega_rabi=uniform)
            case "gamma_decay" | "gamma_dephase" | "nbar" | "detuning":
                return replace(self, **{name: uniform})
            case "j" | "j_par":
                return replace(self, coupling=replace(self.coupling, j_parallel=float(value)))
            case "j_perp":
                return replace(self, coupling=replace(self.coupling, j_perp=float(value)))
        raise ValueError(f"Unknown parameter {name!r}; expected one of {PARAMETER_NAMES}")

    def is_noiseless(self) -> bool:
        return not any(self.gamma_decay) and not any(self.gamma_dephase)


@dataclass(frozen=True)
class ConfigFamily:
    """One-parameter family of configurations sharing everything but `axis`.

    `tie_dephasing` sets gamma_dephase equal to the swept value as well, the
    gamma = Gamma line of the combined-noise analysis.
    """

    base: ArrayConfig
    axis: str = "gamma_decay"
    tie_dephasing: bool = False

    def __post_init__(self) -> None:
        if self.axis not in PARAMETER_NAMES:
            raise ConfigError("axis", f"unknown parameter {self.axis!r}")

    def __call__(self, value: float) -> ArrayConfig:
        config = self.base.with_parameter(self.axis, value)
        if self.tie_dephasing:
            config = config.with_parameter("gamma_dephase", value)
        return config


@dataclass(frozen=True)
class RegimeWarning:
    parameter: str
    site: int | None
    ratio: float

    @property
    def message(self) -> str:
        where = f" at site {self.site}" if self.site is not None else ""
        return (
            f"{self.parameter}/omega0 = {self.ratio:.3g}{where} exceeds "
            f"{REGIME_RATIO_LIMIT}; the rotating-frame master equation may not hold"
        )


@dataclass(frozen=True)
class Liouvillian:
    """Column-stacking generator: d vec(rho)/dt = matrix @ vec(rho)."""

    dim: int
    matrix: SparseMatrix
    config: ArrayConfig | None = None

    @property
    def hilbert_dim(self) -> int:
        return int(round(math.sqrt(self.dim)))

    @property
    def n_qubits(self) -> int:
        return self.hilbert_dim.bit_length() - 1

    def trace_functional_norm(self) -> float:
        trace_row = vectorize(np.eye(self.hilbert_dim)).conj()
        return float(np.linalg.norm(self.matrix.T @ trace_row))

    def dense(self) -> ComplexMatrix:
        return np.asarray(self.matrix.toarray(), dtype=np.complex128)


def _check_size(n_qubits: int) -> None:
    if n_qubits > MAX_QUBITS:
        raise DimensionOverflow(
            f"{n_qubits} qubits give a {4**n_qubits}-dimensional superoperator; "
            f"at most {MAX_QUBITS} qubits are supported"
        )


def _pair_term(coupling: CouplingSpec, site: int, n: int) -> ComplexMatrix:
    def pair(op: ComplexMatrix) -> ComplexMatrix:
        return embed_local(op, site, n) @ embed_local(op, site + 1, n)

    match coupling.kind:
        case CouplingKind.ZZ:
            return -coupling.j_parallel * pair(SIGMA_Z)
        case CouplingKind.XXYY:
            return -coupling.j_perp * (pair(SIGMA_X) + pair(SIGMA_Y)) - (
                coupling.j_parallel * pair(SIGMA_Z)
            )
        case CouplingKind.XYZ:
            jy = coupling.j_perp if coupling.j_y is None else coupling.j_y
            if not math.isclose(coupling.j_perp, jy, rel_tol=0.0, abs_tol=FORMULA_TOL):
                raise UnsupportedCoupling(
                    f"Heisenberg coupling with J_x={coupling.j_perp}, J_y={jy}, "
                    f"J_z={coupling.j_parallel} can no longer be written in terms of a "
                    "time independent effective Hamiltonian in the rotating frame; "
                    "only J_x == J_y (XXYY) is supported"
                )
            return -coupling.j_perp * (pair(SIGMA_X) + pair(SIGMA_Y)) - (
                coupling.j_parallel * pair(SIGMA_Z)
            )
    raise UnsupportedCoupling(f"Unknown coupling kind {coupling.kind!r}")


def build_coherent_hamiltonian(config: ArrayConfig) -> ComplexMatrix:
    n = config.n_qubits
    _check_size(n)
    h = np.zeros((config.dim, config.dim), dtype=np.complex128)
    for j in range(1, n + 1):
        h += -0.5 * config.detuning[j - 1] * embed_local(SIGMA_Z, j, n)
        h += config.omega_rabi[j - 1] * embed_local(SIGMA_X, j, n)
    for j in range(1, n):
        h += _pair_term(config.coupling, j, n)
    return h


def build_effective_hamiltonian(config: ArrayConfig) -> ComplexMatrix:
    """H_coh minus i times the decay and dephasing loss terms."""
    n = config.n_qubits
    h_eff = build_coherent_hamiltonian(config)
    excited = SIGMA_PLUS @ SIGMA_MINUS
    ground = SIGMA_MINUS @ SIGMA_PLUS
    for j in range(1, n + 1):
        decay, nbar = config.gamma_decay[j - 1], config.nbar[j - 1]
        h_eff -= 1j * decay * (nbar + 1) * embed_local(excited, j, n)
        h_eff -= 1j * decay * nbar * embed_local(ground, j, n)
        h_eff -= 1j * config.gamma_dephase[j - 1] * np.eye(config.dim)
    return h_eff


def build_jump_operators(config: ArrayConfig) -> list[ComplexMatrix]:
    n = config.n_qubits
    _check_size(n)
    jumps: list[ComplexMatrix] = []
    for j in range(1, n + 1):
        decay, nbar = config.gamma_decay[j - 1], config.nbar[j - 1]
        dephase = config.gamma_dephase[j - 1]
        for rate, op in (
            (2 * decay * (nbar + 1), SIGMA_MINUS),
            (2 * decay * nbar, SIGMA_PLUS),
            (2 * dephase, SIGMA_Z),
        ):
            if rate > 0:
                jumps.append(math.sqrt(rate) * embed_local(op, j, n))
    return jumps


def _left(op: ComplexMatrix, eye: SparseMatrix) -> SparseMatrix:
    return sp.kron(eye, sp.csr_matrix(op), format="csr")


def _right(op: ComplexMatrix, eye: SparseMatrix) -> SparseMatrix:
    # rho @ op  ->  (op^T kron I) vec(rho)
    return sp.kron(sp.csr_matrix(op.T), eye, format="csr")


def _sandwich(op: ComplexMatrix) -> SparseMatrix:
    # op @ rho @ op^dag  ->  (conj(op) kron op) vec(rho)
    sparse_op = sp.csr_matrix(op)
    return sp.kron(sparse_op.conj(), sparse_op, format="csr")


def build_liouvillian(config: ArrayConfig) -> Liouvillian:
    """Vectorized generator from the effective Hamiltonian and sandwich terms."""
    _check_size(config.n_qubits)
    h_eff = build_effective_hamiltonian(config)
    eye = sp.identity(config.dim, dtype=np.complex128, format="csr")
    generator = -1j * (_left(h_eff, eye) - _right(h_eff.conj().T, eye))
    for jump in build_jump_operators(config):
        generator = generator + _sandwich(jump)
    generator = sp.csr_matrix(generator)
    generator.eliminate_zeros()
    logger.debug(
        "Built Liouvillian for %d qubits: dim=%d nnz=%d",
        config.n_qubits,
        generator.shape[0],
        generator.nnz,
    )
    return Liouvillian(dim=generator.shape[0], matrix=generator, config=config)


def build_liouvillian_standard(
    hamiltonian: npt.ArrayLike, jump_operators: Sequence[npt.ArrayLike]
) -> Liouvillian:
    """-i[H, .] + sum_k (L_k . L_k^dag - {L_k^dag L_k, .}/2), vectorized."""
    h = np.asarray(hamiltonian, dtype=np.complex128)
    eye = sp.identity(h.shape[0], dtype=np.complex128, format="csr")
    generator = -1j * (_left(h, eye) - _right(h, eye))
    for raw in jump_operators:
        jump = np.asarray(raw, dtype=np.complex128)
        loss = jump.conj().T @ jump
        generator = generator + _sandwich(jump)
        generator = generator - 0.5 * (_left(loss, eye) + _right(loss, eye))
    generator = sp.csr_matrix(generator)
    return Liouvillian(dim=generator.shape[0], matrix=generator)


def apply_liouvillian(liouvillian: Liouvillian, rho: npt.ArrayLike) -> ComplexMatrix:
    return unvectorize(liouvillian.matrix @ vectorize(rho))


def nbar_from_temperature(
    omega0: float, temperature: float, k_boltzmann: float = 1.0
) -> float:
    """Bose-Einstein occupation 1 / (exp(omega0 / kT) - 1)."""
    if omega0 <= 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    if temperature < 0:
        raise ValueError(f"temperature must be non-negative, got {temperature}")
    if temperature == 0:
        return 0.0
    x = omega0 / (k_boltzmann * temperature)
    if x > 700:
        return 0.0
    return float(1.0 / math.expm1(x))


def validate_regime(config: ArrayConfig, omega0: float) -> list[RegimeWarning]:
    if omega0 <= 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    candidates: list[RegimeWarning] = []
    for j in range(config.n_qubits):
        site = j + 1
        candidates.append(RegimeWarning("omega", site, config.omega_rabi[j] / omega0))
        candidates.append(
            RegimeWarning(
                "gamma_decay*nbar",
                site,
                config.gamma_decay[j] * config.nbar[j] / omega0,
            )
        )
        candidates.append(RegimeWarning("detuning", site, abs(config.detuning[j]) / omega0))
    if config.n_qubits > 1:
        for strength in config.coupling.couplings():
            candidates.append(RegimeWarning("J", None, abs(strength) / omega0))

    warnings = [w for w in candidates if w.ratio > REGIME_RATIO_LIMIT]
    for w in warnings:
        logger.warning(w.message)
    return warnings
