"""Matplotlib rendering of the assembled panels.

Output is a PNG at a fixed 200 DPI with pinned style and metadata, so the
same inputs always produce the same bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .model import FigureSpec, build_panels  # noqa: E402

DPI = 200
_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def render(spec: FigureSpec) -> Path:
    """Build the panels and write the figure; returns the output path."""
    panels = build_panels(spec)
    fig, axes = plt.subplots(1, len(panels), figsize=(4.2 * len(panels), 3.4),
                             squeeze=False)
    for ax, panel in zip(axes[0], panels):
        for i, curve in enumerate(panel.curves):
            color = _COLORS[i % len(_COLORS)]
            ax.plot(curve.t, curve.mean, color=color, linewidth=1.4,
                    label=curve.label)
            ax.fill_between(curve.t, curve.lower, curve.upper, color=color,
                            alpha=0.2, linewidth=0)
        ax.set_title(panel.title)
        ax.set_xlabel("t")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=7)
    fig.tight_layout()
    out = Path(spec.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata={"Software": "roamplot"})
    plt.close(fig)
    return out
