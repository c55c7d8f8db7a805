from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Literal, TextIO, cast

from qubit_sr.sweep.runner import SweepResult, SweepRow

__all__ = ["OutputFormat", "emit", "format_value", "read_json", "render"]

OutputFormat = Literal["csv", "json"]


def format_value(value: float | None) -> str:
    """Full double precision with '.' as decimal separator; None becomes empty."""
    return "" if value is None else format(value, ".17g")


def _write_csv(result: SweepResult, stream: TextIO) -> None:
    for key, value in result.metadata.items():
        stream.write(f"# {key}={value}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([*result.axes, "measure", "value", "flag"])
    for row in result.rows:
        writer.writerow(
            [*(format_value(v) for v in row.point), row.measure, format_value(row.value), row.flag]
        )


def _as_json(result: SweepResult) -> dict[str, object]:
    rows = []
    for row in result.rows:
        entry: dict[str, object] = dict(zip(result.axes, row.point))
        entry.update(measure=row.measure, value=row.value, flag=row.flag)
        rows.append(entry)
    return {"metadata": result.metadata, "axes": list(result.axes), "rows": rows}


def render(result: SweepResult, fmt: OutputFormat = "csv") -> str:
    if fmt == "json":
        return json.dumps(_as_json(result), indent=2, ensure_ascii=False) + "\n"
    buffer = io.StringIO()
    _write_csv(result, buffer)
    return buffer.getvalue()


def emit(
    result: SweepResult, fmt: OutputFormat = "csv", path: str | Path | None = None
) -> None:
    """Write `result` to `path`, or to stdout when no path is given."""
    text = render(result, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def read_json(path: str | Path) -> SweepResult:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    axes = tuple(cast(list[str], data["axes"]))
    rows = [
        SweepRow(
            point=tuple(float(entry[a]) for a in axes),
            measure=str(entry["measure"]),
            value=None if entry["value"] is None else float(entry["value"]),
            flag=str(entry.get("flag", "")),
        )
        for entry in data["rows"]
    ]
    return SweepResult(axes, rows, dict(data["metadata"]))
