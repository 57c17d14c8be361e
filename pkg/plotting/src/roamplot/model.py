"""Data model between the aggregate CSVs and the rendered figures.

The input schema is the simulator's aggregate table,
`t,metric,mean,std,half_width`, with empty fields for absent values. Panels
are built from three of its metrics: cumulative regret, estimation error,
and the critical ratio; only the critical-ratio panel is smoothed (trailing
mean over present values), and bands are mean +/- half_width throughout. No
other transformation sits between the files and the drawn values.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

AGGREGATE_COLUMNS = ("t", "metric", "mean", "std", "half_width")

PANEL_METRICS = {
    "regret": ("cum_regret", "Cumulative regret"),
    "error": ("est_error", "Estimation error"),
    "ratio": ("critical_ratio", "Critical ratio"),
}
PANEL_ORDER = ("regret", "error", "ratio")
DEFAULT_WINDOW = 10


class SchemaError(ValueError):
    """The input file does not match the aggregate schema."""


@dataclass(frozen=True)
class FigureSpec:
    inputs: list[Path]
    labels: list[str]
    out: Path
    panel: str = "all"
    window: int = DEFAULT_WINDOW

    def validate(self):
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        if len(self.inputs) != len(self.labels):
            raise ValueError(
                f"{len(self.inputs)} inputs but {len(self.labels)} labels")
        if self.panel != "all" and self.panel not in PANEL_METRICS:
            raise ValueError(f"unknown panel {self.panel!r}")
        if self.window < 1:
            raise ValueError("window must be at least 1")


@dataclass(frozen=True)
class Curve:
    label: str
    t: np.ndarray
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


@dataclass(frozen=True)
class Panel:
    name: str
    title: str
    curves: list[Curve] = field(default_factory=list)


def _parse(value: str) -> float:
    return math.nan if value == "" else float(value)


def load_aggregate(path) -> dict[str, dict[str, np.ndarray]]:
    """Parse one aggregate CSV into {metric: {t, mean, half_width}}."""
    path = Path(path)
    per_metric: dict[str, list] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        for i, (expected, found) in enumerate(zip(AGGREGATE_COLUMNS, header)):
            if expected != found:
                raise SchemaError(
                    f"{path}: column {i + 1} should be {expected!r}, found {found!r}")
        if len(header) != len(AGGREGATE_COLUMNS):
            raise SchemaError(
                f"{path}: expected {len(AGGREGATE_COLUMNS)} columns, found {len(header)}")
        for row in reader:
            if len(row) != len(AGGREGATE_COLUMNS):
                raise SchemaError(f"{path}: row with {len(row)} fields: {row!r}")
            per_metric.setdefault(row[1], []).append(row)
    out = {}
    for metric, rows in per_metric.items():
        out[metric] = {
            "t": np.array([int(r[0]) for r in rows]),
            "mean": np.array([_parse(r[2]) for r in rows]),
            "half_width": np.array([_parse(r[4]) for r in rows]),
        }
    return out


def smooth_present(series: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over the present (non-NaN) values in each window.

    Positions whose window holds no present value stay NaN, so gaps remain
    gaps instead of turning into zeros.
    """
    series = np.asarray(series, dtype=float)
    out = np.full(series.size, np.nan)
    for i in range(series.size):
        chunk = series[max(0, i - window + 1):i + 1]
        present = chunk[~np.isnan(chunk)]
        if present.size:
            out[i] = float(present.mean())
    return out


def build_panels(spec: FigureSpec) -> list[Panel]:
    """Load every input and assemble the requested panels.

    All curves must share the time axis. The regret and error panels carry
    the CSV values untouched; the ratio panel is smoothed with spec.window.
    """
    spec.validate()
    tables = [load_aggregate(path) for path in spec.inputs]
    names = PANEL_ORDER if spec.panel == "all" else (spec.panel,)
    t_ref = None
    panels = []
    for name in names:
        metric, title = PANEL_METRICS[name]
        curves = []
        for path, label, table in zip(spec.inputs, spec.labels, tables):
            if metric not in table:
                raise SchemaError(f"{path}: metric {metric!r} missing")
            t = table[metric]["t"]
            if t_ref is None:
                t_ref = t
            elif not np.array_equal(t, t_ref):
                raise SchemaError(f"{path}: time axis differs between inputs")
            mean = table[metric]["mean"]
            half = table[metric]["half_width"]
            if name == "ratio" and spec.window > 1:
                mean = smooth_present(mean, spec.window)
                half = smooth_present(half, spec.window)
            curves.append(Curve(label=label, t=t, mean=mean,
                                lower=mean - half, upper=mean + half))
        panels.append(Panel(name=name, title=title, curves=curves))
    return panels
