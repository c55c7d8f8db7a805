from __future__ import annotations

import json
import math
import sys
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import cast

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - py310
    import tomli as tomllib

from qubit_sr.errors import ConfigError
from qubit_sr.generator import (
    PARAMETER_NAMES,
    ArrayConfig,
    CouplingKind,
    CouplingSpec,
    nbar_from_temperature,
)

__all__ = [
    "AXIS_ALIASES",
    "MEASURE_NAMES",
    "ParsedConfig",
    "SweepAxis",
    "SweepSpec",
    "config_from_mapping",
    "load_config_data",
    "parse_config",
]

AXIS_ALIASES: dict[str, str] = {
    "Γ": "gamma_decay",
    "gamma": "gamma_decay",
    "γ": "gamma_dephase",
    "J": "j",
    "J_⊥": "j_perp",
    "J_∥": "j_par",
    "δ": "detuning",
}

MEASURE_NAMES = (
    "eof",
    "concurrence",
    "negativity",
    "mutual_information",
    "eigenvalues",
    "p_z",
    "p_x",
    "residual",
    "purity",
    "ppt_min_eigenvalue",
)

_TOP_LEVEL_KEYS = {
    "n_qubits",
    "omega",
    "detuning",
    "gamma_decay",
    "gamma_dephase",
    "nbar",
    "temperature",
    "omega0",
    "coupling",
    "sweep",
}
_COUPLING_KEYS = {"kind", "j", "j_par", "j_perp", "jx", "jy", "jz"}
_AXIS_KEYS = {"axis", "grid"}
_SWEEP_KEYS = _AXIS_KEYS | {"inner", "measures", "cut", "site", "pair", "tie_dephasing"}
_TWO_QUBIT_MEASURES = {
    "eof",
    "concurrence",
    "ppt_min_eigenvalue",
    "negativity",
    "mutual_information",
}
_GRID_KEYS = {"start", "stop", "count", "spacing"}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.name not in PARAMETER_NAMES:
            raise ConfigError("axis", f"unknown parameter {self.name!r}")
        if len(self.values) < 2:
            raise ConfigError("grid", "needs at least two points")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("grid", "values must be strictly increasing")


@dataclass(frozen=True)
class SweepSpec:
    base: ArrayConfig
    axis: SweepAxis
    measures: tuple[str, ...] = ("eof",)
    inner: SweepAxis | None = None
    cut: tuple[int, ...] = (1,)
    site: int = 1
    # Two-qubit measures on larger arrays use the reduced state of this pair;
    # when set, mutual_information is taken across the pair instead of `cut`.
    pair: tuple[int, int] | None = None
    # Keep gamma_dephase equal to the swept value (the gamma = Gamma line).
    tie_dephasing: bool = False

    def __post_init__(self) -> None:
        for i, name in enumerate(self.measures):
            if name not in MEASURE_NAMES:
                raise ConfigError(f"sweep.measures[{i}]", f"unknown measure {name!r}")
        n = self.base.n_qubits
        if not 1 <= self.site <= n:
            raise ConfigError("sweep.site", f"must be in [1, {n}], got {self.site}")
        if not self.cut or any(not 1 <= s <= n for s in self.cut):
            raise ConfigError("sweep.cut", f"sites must be in [1, {n}]")
        if len(set(self.cut)) == n and {"mutual_information", "negativity"} & set(
            self.measures
        ):
            raise ConfigError("sweep.cut", "cut must leave at least one site out")
        if self.pair is not None and (
            len(set(self.pair)) != 2 or any(not 1 <= s <= n for s in self.pair)
        ):
            raise ConfigError("sweep.pair", f"expected two distinct sites in [1, {n}]")
        if n < 2 and any(m in _TWO_QUBIT_MEASURES for m in self.measures):
            raise ConfigError("sweep.measures", "two-qubit measures need at least two qubits")

    def points(self) -> list[tuple[float, ...]]:
        """Grid points in row order: outer axis slowest."""
        if self.inner is None:
            return [(v,) for v in self.axis.values]
        return [(v, w) for v in self.axis.values for w in self.inner.values]

    def axis_names(self) -> tuple[str, ...]:
        if self.inner is None:
            return (self.axis.name,)
        return (self.axis.name, self.inner.name)

    def config_at(self, point: Sequence[float]) -> ArrayConfig:
        config = self.base
        for name, value in zip(self.axis_names(), point):
            config = config.with_parameter(name, value)
            if self.tie_dephasing and name == "gamma_decay":
                config = config.with_parameter("gamma_dephase", value)
        return config


@dataclass(frozen=True)
class ParsedConfig:
    config: ArrayConfig
    sweep: SweepSpec | None = None
    omega0: float | None = None
    source: dict[str, object] = field(default_factory=dict)


def _check_keys(data: Mapping[str, object], allowed: set[str], prefix: str) -> None:
    for key in data:
        if key not in allowed:
            path = f"{prefix}.{key}" if prefix else key
            raise ConfigError(path, "unknown key")


def _number(value: object, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    return float(value)


def _rates(
    data: Mapping[str, object], key: str, n: int, default: float | None = 0.0
) -> tuple[float, ...]:
    if key not in data:
        if default is None:
            raise ConfigError(key, "required")
        return (default,) * n
    value = data[key]
    if isinstance(value, list):
        if len(value) != n:
            raise ConfigError(key, f"expected {n} values, got {len(value)}")
        return tuple(_number(v, f"{key}[{i}]") for i, v in enumerate(value))
    return (_number(value, key),) * n


def _coupling(data: object, n: int) -> CouplingSpec:
    if data is None:
        if n > 1:
            raise ConfigError("coupling", "required for more than one qubit")
        return CouplingSpec()
    if not isinstance(data, dict):
        raise ConfigError("coupling", "expected a table")
    _check_keys(data, _COUPLING_KEYS, "coupling")
    raw_kind = str(data.get("kind", "ZZ")).upper()
    try:
        kind = CouplingKind(raw_kind)
    except ValueError:
        raise ConfigError("coupling.kind", f"unknown coupling kind {raw_kind!r}") from None

    def get(key: str) -> float:
        return _number(data.get(key, 0.0), f"coupling.{key}")

    match kind:
        case CouplingKind.ZZ:
            return CouplingSpec.zz(get("j"))
        case CouplingKind.XXYY:
            return CouplingSpec.xxyy(get("j_perp"), get("j_par"))
        case CouplingKind.XYZ:
            return CouplingSpec.heisenberg(get("jx"), get("jy"), get("jz"))
    raise ConfigError("coupling.kind", f"unknown coupling kind {raw_kind!r}")


def _grid(data: object, path: str, axis: str) -> tuple[float, ...]:
    if isinstance(data, list):
        return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(data))
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a list of values or a {start, stop, count} table")
    _check_keys(data, _GRID_KEYS, path)
    for key in ("start", "stop", "count"):
        if key not in data:
            raise ConfigError(f"{path}.{key}", "required")
    start = _number(data["start"], f"{path}.start")
    stop = _number(data["stop"], f"{path}.stop")
    count = data["count"]
    if isinstance(count, bool) or not isinstance(count, int) or count < 2:
        raise ConfigError(f"{path}.count", f"must be an integer >= 2, got {count!r}")
    spacing = data.get("spacing", "log" if axis == "gamma_decay" else "linear")
    match spacing:
        case "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(path, "log spacing needs positive start and stop")
            values = np.geomspace(start, stop, count)
        case "linear":
            values = np.linspace(start, stop, count)
        case _:
            raise ConfigError(f"{path}.spacing", f"expected 'log' or 'linear', got {spacing!r}")
    return tuple(float(v) for v in values)


def _axis(data: Mapping[str, object], prefix: str) -> SweepAxis:
    _check_keys(data, _AXIS_KEYS, prefix)
    if "axis" not in data:
        raise ConfigError(f"{prefix}.axis", "required")
    raw = str(data["axis"])
    name = AXIS_ALIASES.get(raw, raw)
    if name not in PARAMETER_NAMES:
        raise ConfigError(f"{prefix}.axis", f"unknown parameter {raw!r}")
    if "grid" not in data:
        raise ConfigError(f"{prefix}.grid", "required")
    values = _grid(data["grid"], f"{prefix}.grid", name)
    try:
        return SweepAxis(name, values)
    except ConfigError as exc:
        raise ConfigError(f"{prefix}.{exc.path}", exc.message) from None


def _sweep(data: object, base: ArrayConfig) -> SweepSpec:
    if not isinstance(data, dict):
        raise ConfigError("sweep", "expected a table")
    _check_keys(data, _SWEEP_KEYS, "sweep")
    outer = _axis({k: v for k, v in data.items() if k in _AXIS_KEYS}, "sweep")
    inner = None
    if "inner" in data:
        if not isinstance(data["inner"], dict):
            raise ConfigError("sweep.inner", "expected a table")
        inner = _axis(data["inner"], "sweep.inner")
    measures = data.get("measures", ["eof"])
    if not isinstance(measures, list) or not measures:
        raise ConfigError("sweep.measures", "expected a non-empty list")
    cut = data.get("cut", [1])
    if not isinstance(cut, list) or any(isinstance(s, bool) or not isinstance(s, int) for s in cut):
        raise ConfigError("sweep.cut", "expected a list of site numbers")
    site = data.get("site", 1)
    if isinstance(site, bool) or not isinstance(site, int):
        raise ConfigError("sweep.site", f"expected a site number, got {site!r}")
    pair = data.get("pair")
    if pair is not None and (
        not isinstance(pair, list)
        or len(pair) != 2
        or any(isinstance(s, bool) or not isinstance(s, int) for s in pair)
    ):
        raise ConfigError("sweep.pair", "expected two site numbers")
    return SweepSpec(
        base=base,
        axis=outer,
        measures=tuple(str(m) for m in measures),
        inner=inner,
        cut=tuple(cut),
        site=site,
        pair=(pair[0], pair[1]) if pair is not None else None,
        tie_dephasing=bool(data.get("tie_dephasing", False)),
    )


def config_from_mapping(data: Mapping[str, object]) -> ParsedConfig:
    """Validate a decoded config document."""
    _check_keys(data, _TOP_LEVEL_KEYS, "")
    n = data.get("n_qubits")
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError("n_qubits", f"expected an integer, got {n!r}")
    if n < 1:
        raise ConfigError("n_qubits", f"must be >= 1, got {n}")

    omega0 = _number(data["omega0"], "omega0") if "omega0" in data else None
    nbar = _rates(data, "nbar", n)
    if "temperature" in data and "nbar" in data:
        raise ConfigError("temperature", "give either temperature or nbar, not both")
    if "temperature" in data:
        if omega0 is None:
            raise ConfigError("omega0", "required to derive nbar from temperature")
        temperature = _number(data["temperature"], "temperature")
        try:
            nbar = (nbar_from_temperature(omega0, temperature),) * n
        except ValueError as exc:
            raise ConfigError("temperature", str(exc)) from None

    config = ArrayConfig(
        n_qubits=n,
        omega_rabi=_rates(data, "omega", n, default=None),
        detuning=_rates(data, "detuning", n),
        gamma_decay=_rates(data, "gamma_decay", n),
        gamma_dephase=_rates(data, "gamma_dephase", n),
        nbar=nbar,
        coupling=_coupling(data.get("coupling"), n),
    )
    sweep = _sweep(data["sweep"], config) if "sweep" in data else None
    return ParsedConfig(config, sweep, omega0, dict(data))


def load_config_data(path: str | Path) -> dict[str, object]:
    """Decode a TOML file, or JSON when the suffix is .json."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    try:
        if p.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError("", f"{p}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("", f"{p}: top level must be a table")
    return cast(dict[str, object], data)


def parse_config(path: str | Path) -> ParsedConfig:
    return config_from_mapping(load_config_data(path))
