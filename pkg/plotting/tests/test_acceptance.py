"""Acceptance for the plotting layer: the figure round-trip criterion.

Generates the roam-vs-colstim sweep at full scale through the simulator CLI
(the only interface between the two packages), renders the three-panel
figure, and checks that the regret curves in the data model equal the CSV
means exactly. Expect several minutes for the sweep itself.
"""

import csv
import math
import subprocess

import numpy as np
import pytest

from roamplot.model import FigureSpec, build_panels
from roamplot.render import render

FIG3_LABELS = ("fig3_roam", "fig3_colstim_c1_1_c2_0.1", "fig3_colstim_c1_1_c2_1",
               "fig3_colstim_c1_10_c2_0.1", "fig3_colstim_c1_10_c2_1")


@pytest.fixture(scope="session")
def fig3_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig3_csv")
    proc = subprocess.run(
        ["roambandit", "preset", "fig3_vs_colstim", "--out", str(out),
         "--parallel", "1"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out


def _csv_means(path, metric):
    means = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if row[1] == metric:
                means.append(math.nan if row[2] == "" else float(row[2]))
    return np.array(means)


def test_criterion_11_figure_round_trip(fig3_dir, tmp_path):
    inputs = [fig3_dir / f"{label}_aggregate.csv" for label in FIG3_LABELS]
    for path in inputs:
        assert path.exists(), path
    spec = FigureSpec(inputs=inputs, labels=list(FIG3_LABELS),
                      out=tmp_path / "fig3.png", panel="all", window=10)
    png = render(spec)
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    regret = next(p for p in build_panels(spec) if p.name == "regret")
    assert len(regret.curves) == len(FIG3_LABELS)
    exact = True
    for path, curve in zip(inputs, regret.curves):
        expected = _csv_means(path, "cum_regret")
        exact = exact and np.array_equal(curve.mean, expected, equal_nan=True)
    print(f"[criterion 11] figure round trip: {'PASS' if exact else 'FAIL'} "
          f"(regret panel equals CSV means for {len(inputs)} curves; "
          f"three-panel PNG at {png})", flush=True)
    for path, curve in zip(inputs, regret.curves):
        assert np.array_equal(curve.mean, _csv_means(path, "cum_regret"),
                              equal_nan=True), path
