from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence

import numpy as np

from qubit_sr import __version__
from qubit_sr.constants import SOLVER_TOL
from qubit_sr.errors import (
    ConfigError,
    DimensionOverflow,
    NoConvergence,
    NonUniqueSteadyState,
    NoSignChange,
    StepSizeUnstable,
    UnsupportedCoupling,
)
from qubit_sr.generator import (
    ConfigFamily,
    CouplingKind,
    build_liouvillian,
    validate_regime,
)
from qubit_sr.steady import check_uniqueness, solve_steady_numeric
from qubit_sr.sweep import (
    MEASURE_NAMES,
    emit,
    evaluate_measures,
    figure_names,
    parse_config,
    run_figure,
    run_sweep,
)
from qubit_sr.thresholds import (
    approx_combined_window,
    entangled_window,
    threshold_xxyy,
    threshold_zz,
)

__all__ = ["build_parser", "main"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2

_INPUT_ERRORS = (ConfigError, UnsupportedCoupling, DimensionOverflow, OSError, ValueError)
_SOLVER_ERRORS = (NonUniqueSteadyState, NoConvergence, StepSizeUnstable, NoSignChange)


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def _default_measures(n_qubits: int) -> list[str]:
    if n_qubits == 1:
        return ["purity", "p_z", "p_x"]
    if n_qubits == 2:
        return ["concurrence", "eof", "mutual_information", "purity", "p_z", "p_x"]
    return ["mutual_information", "negativity", "purity", "p_z", "p_x"]


def _cmd_steady(args: argparse.Namespace) -> int:
    parsed = parse_config(args.config)
    report = solve_steady_numeric(build_liouvillian(parsed.config), residual_bound=args.tol)
    measures = args.measures or _default_measures(parsed.config.n_qubits)
    values = evaluate_measures(report, measures, site=args.site)

    if args.format == "json":
        payload = {
            "method": report.method.value,
            "residual": report.residual,
            "null_space_dim": report.null_space_dim,
            "state": {
                "real": report.state.matrix.real.tolist(),
                "imag": report.state.matrix.imag.tolist(),
            },
            "measures": dict(values),
        }
        print(json.dumps(payload, indent=2))
        return EXIT_OK

    print(f"method: {report.method.value}")
    print(f"residual: {report.residual:.3e}")
    print(f"null_space_dim: {report.null_space_dim}")
    print("state:")
    print(np.array2string(report.state.matrix, precision=6, suppress_small=True))
    for name, value in values:
        print(f"{name}: {value:.17g}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    parsed = parse_config(args.config)
    if parsed.sweep is None:
        raise ConfigError("sweep", "config has no [sweep] table")
    result = run_sweep(
        parsed.sweep, jobs=args.jobs, residual_bound=args.tol, source=parsed.source
    )
    emit(result, args.format, args.out)
    return EXIT_OK


def _cmd_figure(args: argparse.Namespace) -> int:
    result = run_figure(args.name, jobs=args.jobs)
    emit(result, args.format, args.out)
    return EXIT_OK


def _cmd_threshold(args: argparse.Namespace) -> int:
    config = parse_config(args.config).config
    if config.n_qubits != 2:
        raise ValueError("threshold analysis needs a two-qubit config")
    omega = config.omega_rabi[0]
    coupling = config.coupling
    if coupling.kind is CouplingKind.ZZ:
        analytic = threshold_zz(omega, coupling.j_parallel)
    else:
        analytic = threshold_xxyy(omega, coupling.j_perp, coupling.j_parallel)
    print(f"analytic Gamma_th (gamma = 0): {analytic:.17g}")

    s = abs(coupling.anisotropy) / omega
    window = approx_combined_window(s)
    if window is None:
        print("approximate window (gamma = Gamma): none")
    else:
        print(f"approximate window (gamma = Gamma): r in ({window[0]:.6g}, {window[1]:.6g})")

    family = ConfigFamily(config, "gamma_decay", tie_dephasing=args.tie_dephasing)
    grid = [g * omega for g in np.geomspace(args.gamma_min, args.gamma_max, args.points)]
    result = entangled_window(family, grid, args.tol_gamma * omega)
    if not result.entangled:
        print("numerical window: separable on the whole grid")
    else:
        print(f"numerical window: lower={result.lower:.10g} upper={result.upper:.10g}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    parsed = parse_config(args.config)
    omega0 = args.omega0 if args.omega0 is not None else parsed.omega0
    if omega0 is None:
        print("regime: skipped (no omega0 given)")
    else:
        warnings = validate_regime(parsed.config, omega0)
        if not warnings:
            print("regime: ok")
        for warning in warnings:
            print(f"regime: {warning.message}")
    uniqueness = check_uniqueness(build_liouvillian(parsed.config))
    print(f"unique steady state: {'yes' if uniqueness.unique else 'no'}")
    print(f"null space dimension: {uniqueness.null_dim}")
    return EXIT_OK if uniqueness.unique else EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    noise.add_argument("--quiet", "-q", action="store_true", help="Only warnings and errors")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=["csv", "json"], default="csv")
    output.add_argument("--out", default=None, help="Output file (default: stdout)")
    output.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="Worker processes (default: one per CPU)",
    )

    parser = argparse.ArgumentParser(
        prog="qubit-sr",
        description="Steady-state entanglement of driven, noisy qubit arrays",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    steady = sub.add_parser("steady", parents=[common], help="Solve one steady state")
    steady.add_argument("--config", required=True)
    steady.add_argument("--format", choices=["text", "json"], default="text")
    steady.add_argument("--tol", type=float, default=SOLVER_TOL, help="Residual bound")
    steady.add_argument("--measures", nargs="+", choices=MEASURE_NAMES, default=None)
    steady.add_argument("--site", type=int, default=1, help="Site for p_z / p_x")
    steady.set_defaults(handler=_cmd_steady)

    sweep = sub.add_parser("sweep", parents=[common, output], help="Run a parameter sweep")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--tol", type=float, default=SOLVER_TOL, help="Residual bound")
    sweep.set_defaults(handler=_cmd_sweep)

    figure = sub.add_parser("figure", parents=[common, output], help="Regenerate figure data")
    figure.add_argument("name", choices=figure_names())
    figure.set_defaults(handler=_cmd_figure)

    threshold = sub.add_parser("threshold", parents=[common], help="Separability thresholds")
    threshold.add_argument("--config", required=True)
    threshold.add_argument(
        "--tie-dephasing",
        action="store_true",
        help="Scan along gamma = Gamma instead of the configured dephasing",
    )
    threshold.add_argument("--gamma-min", type=float, default=0.01)
    threshold.add_argument("--gamma-max", type=float, default=30.0)
    threshold.add_argument("--points", type=int, default=60)
    threshold.add_argument(
        "--tol", dest="tol_gamma", type=float, default=1e-6, help="Edge tolerance / Omega"
    )
    threshold.set_defaults(handler=_cmd_threshold)

    validate = sub.add_parser(
        "validate", parents=[common], help="Regime and uniqueness checks"
    )
    validate.add_argument("--config", required=True)
    validate.add_argument("--omega0", type=float, default=None, help="Qubit frequency")
    validate.set_defaults(handler=_cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        return int(args.handler(args))
    except _SOLVER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
