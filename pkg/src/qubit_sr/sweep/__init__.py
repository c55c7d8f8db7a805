from __future__ import annotations

from qubit_sr.sweep.config import (
    MEASURE_NAMES,
    ParsedConfig,
    SweepAxis,
    SweepSpec,
    config_from_mapping,
    parse_config,
)
from qubit_sr.sweep.figures import FIGURES, figure_names, run_figure
from qubit_sr.sweep.output import emit, read_json, render
from qubit_sr.sweep.runner import SweepResult, SweepRow, evaluate_measures, run_sweep

__all__ = [
    "FIGURES",
    "MEASURE_NAMES",
    "ParsedConfig",
    "SweepAxis",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "config_from_mapping",
    "emit",
    "evaluate_measures",
    "figure_names",
    "parse_config",
    "read_json",
    "render",
    "run_figure",
    "run_sweep",
]
