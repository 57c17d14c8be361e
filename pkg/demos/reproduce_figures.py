"""Reproduce the three stock experiments end to end.

Drives the CLI presets (dimension sweep, exploration-length sweep, and the
roam-vs-colstim comparison), writing per-config trajectory and aggregate
CSVs under results/, then renders each sweep as a three-panel figure with
the companion plotting package (if it is installed).

At the full n=100 this takes around 20 minutes on one core; pass a smaller
run count to sketch the curves quickly:

    python3 demos/reproduce_figures.py 10
"""

import shutil
import subprocess
import sys
from pathlib import Path

from roambandit.cli import main as roambandit_main

n_runs = sys.argv[1] if len(sys.argv) > 1 else "100"
out = Path("results")

sweeps = {
    "fig1_dim_sweep": [f"fig1_d{d}" for d in (2, 4, 6, 8, 10)],
    "fig2_tau_sweep": [f"fig2_tau{t}" for t in (0, 25, 50, 75, 100)],
    "fig3_vs_colstim": ["fig3_roam"] + [f"fig3_colstim_c1_{c1}_c2_{c2}"
                                        for c1 in (1, 10) for c2 in (0.1, 1)],
}

for name, labels in sweeps.items():
    print(f"== {name} (n_runs={n_runs}) ==")
    code = roambandit_main(["preset", name, "--out", str(out / name),
                            "--runs", n_runs])
    if code != 0:
        sys.exit(code)
    if shutil.which("plot") is None:
        continue
    inputs = [str(out / name / f"{label}_aggregate.csv") for label in labels]
    subprocess.run(["plot", "--inputs", *inputs, "--labels", *labels,
                    "--panel", "all", "--out", str(out / f"{name}.png")],
                   check=True)
    print(f"rendered {out / f'{name}.png'}")

if shutil.which("plot") is None:
    print("\nplotting package not installed; CSVs are under results/.")
    print("install it with: pip install -e plotting/ --no-build-isolation")
