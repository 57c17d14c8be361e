"""Flat-file output: trajectory and aggregate tables as CSV or JSON.

CSV schemas (headers are exact):
    trajectories: run,t,inst_regret,cum_regret,est_error,critical_ratio
    aggregate:    t,metric,mean,std,half_width

Absent values are empty CSV fields (null in JSON). Floats are written with
repr so a re-import reproduces the values exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .harness import METRICS, AggregateStats, BatchResult, MetricBand, Trajectory

TRAJECTORY_HEADER = "run,t,inst_regret,cum_regret,est_error,critical_ratio"
AGGREGATE_HEADER = "t,metric,mean,std,half_width"

FORMATS = ("csv", "json")


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def _parse(s: str) -> float:
    return math.nan if s == "" else float(s)


def _jsonify(arr: np.ndarray) -> list:
    return [None if math.isnan(v) else float(v) for v in arr]


def _unjsonify(values: list) -> np.ndarray:
    return np.array([math.nan if v is None else float(v) for v in values])


def write_trajectories_csv(trajectories: list[Trajectory], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER.split(","))
        for traj in trajectories:
            for i in range(traj.t.size):
                writer.writerow([traj.run_index, int(traj.t[i]),
                                 _fmt(traj.inst_regret[i]), _fmt(traj.cum_regret[i]),
                                 _fmt(traj.est_error[i]), _fmt(traj.critical_ratio[i])])


def read_trajectories_csv(path) -> list[Trajectory]:
    rows: dict[int, list] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRAJECTORY_HEADER.split(","):
            raise ValueError(f"unexpected trajectory header in {path}: {header}")
        for row in reader:
            rows.setdefault(int(row[0]), []).append(row[1:])
    out = []
    for run_index in sorted(rows):
        cols = list(zip(*rows[run_index]))
        out.append(Trajectory(
            run_index=run_index,
            t=np.array([int(v) for v in cols[0]]),
            inst_regret=np.array([_parse(v) for v in cols[1]]),
            cum_regret=np.array([_parse(v) for v in cols[2]]),
            est_error=np.array([_parse(v) for v in cols[3]]),
            critical_ratio=np.array([_parse(v) for v in cols[4]])))
    return out


def write_aggregate_csv(agg: AggregateStats, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATE_HEADER.split(","))
        for name in METRICS:
            band = agg.metrics[name]
            for i in range(agg.t.size):
                writer.writerow([int(agg.t[i]), name, _fmt(band.mean[i]),
                                 _fmt(band.std[i]), _fmt(band.half_width[i])])


def read_aggregate_csv(path) -> AggregateStats:
    per_metric: dict[str, list] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != AGGREGATE_HEADER.split(","):
            raise ValueError(f"unexpected aggregate header in {path}: {header}")
        for row in reader:
            per_metric.setdefault(row[1], []).append(row)
    t_ref = None
    metrics = {}
    for name, rows in per_metric.items():
        t = np.array([int(r[0]) for r in rows])
        if t_ref is None:
            t_ref = t
        elif not np.array_equal(t, t_ref):
            raise ValueError(f"metric {name!r} disagrees on the time axis")
        metrics[name] = MetricBand(
            mean=np.array([_parse(r[2]) for r in rows]),
            std=np.array([_parse(r[3]) for r in rows]),
            half_width=np.array([_parse(r[4]) for r in rows]))
    if t_ref is None:
        raise ValueError(f"aggregate file {path} has no rows")
    return AggregateStats(t=t_ref, metrics=metrics)


def write_trajectories_json(trajectories: list[Trajectory], path) -> None:
    runs = [{"run": traj.run_index, "t": [int(v) for v in traj.t],
             "inst_regret": _jsonify(traj.inst_regret),
             "cum_regret": _jsonify(traj.cum_regret),
             "est_error": _jsonify(traj.est_error),
             "critical_ratio": _jsonify(traj.critical_ratio)}
            for traj in trajectories]
    with open(path, "w") as fh:
        json.dump({"schema": "roambandit.trajectories/v1", "runs": runs}, fh)
        fh.write("\n")


def read_trajectories_json(path) -> list[Trajectory]:
    with open(path) as fh:
        doc = json.load(fh)
    return [Trajectory(run_index=int(r["run"]), t=np.array(r["t"], dtype=int),
                       inst_regret=_unjsonify(r["inst_regret"]),
                       cum_regret=_unjsonify(r["cum_regret"]),
                       est_error=_unjsonify(r["est_error"]),
                       critical_ratio=_unjsonify(r["critical_ratio"]))
            for r in doc["runs"]]


def write_aggregate_json(agg: AggregateStats, path) -> None:
    doc = {"schema": "roambandit.aggregate/v1", "t": [int(v) for v in agg.t],
           "metrics": {name: {"mean": _jsonify(band.mean),
                              "std": _jsonify(band.std),
                              "half_width": _jsonify(band.half_width)}
                       for name, band in agg.metrics.items()}}
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_aggregate_json(path) -> AggregateStats:
    with open(path) as fh:
        doc = json.load(fh)
    metrics = {name: MetricBand(mean=_unjsonify(m["mean"]), std=_unjsonify(m["std"]),
                                half_width=_unjsonify(m["half_width"]))
               for name, m in doc["metrics"].items()}
    return AggregateStats(t=np.array(doc["t"], dtype=int), metrics=metrics)


def export(result: BatchResult, out_dir, fmt: str = "csv", prefix: str = "") -> list[Path]:
    """Write a batch's trajectories and aggregate under out_dir; returns the
    written paths."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    if not result.trajectories:
        raise ValueError("refusing to export an empty batch")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj_path = out_dir / f"{prefix}trajectories.{fmt}"
    agg_path = out_dir / f"{prefix}aggregate.{fmt}"
    if fmt == "csv":
        write_trajectories_csv(result.trajectories, traj_path)
        write_aggregate_csv(result.aggregate, agg_path)
    else:
        write_trajectories_json(result.trajectories, traj_path)
        write_aggregate_json(result.aggregate, agg_path)
    return [traj_path, agg_path]


def import_results(out_dir, fmt: str = "csv", prefix: str = "") -> BatchResult:
    """Read back what export wrote."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    out_dir = Path(out_dir)
    traj_path = out_dir / f"{prefix}trajectories.{fmt}"
    agg_path = out_dir / f"{prefix}aggregate.{fmt}"
    if fmt == "csv":
        return BatchResult(trajectories=read_trajectories_csv(traj_path),
                           aggregate=read_aggregate_csv(agg_path))
    return BatchResult(trajectories=read_trajectories_json(traj_path),
                       aggregate=read_aggregate_json(agg_path))


def aggregates_equal(a: AggregateStats, b: AggregateStats) -> bool:
    """Exact equality with NaN == NaN, the round-trip check."""
    if not np.array_equal(a.t, b.t) or set(a.metrics) != set(b.metrics):
        return False
    return all(
        np.array_equal(a.metrics[name].mean, b.metrics[name].mean, equal_nan=True)
        and np.array_equal(a.metrics[name].std, b.metrics[name].std, equal_nan=True)
        and np.array_equal(a.metrics[name].half_width, b.metrics[name].half_width,
                           equal_nan=True)
        for name in a.metrics)
