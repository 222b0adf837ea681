"""Positive-quadrant figures of compatible sets with data overlays."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .compat_set import build, quadrant_chain  # noqa: E402
from .io import write_xy_csv  # noqa: E402

BOUNDARY_VERTICES = 256
STYLE = {
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "svg.hashsalt": "ddinfer",
    "svg.fonttype": "none",
}


def boundary(ch, k: int = BOUNDARY_VERTICES) -> np.ndarray:
    """Upper boundary of S in the positive quadrant, from ``(1, 0)`` to ``(0, top)``."""
    return quadrant_chain(build(ch), k)


def plot_sets(channels: dict, points=(), out=None, title: str | None = None):
    """Draw each labelled channel's set boundary and the ``(x, y)`` data points.

    With ``out`` the figure is saved (format from the suffix) and a CSV with
    columns ``label,x,y`` is written next to it; the figure is returned
    either way.
    """
    rows = []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        for label, ch in channels.items():
            b = boundary(ch)
            ax.plot(b[:, 0], b[:, 1], label=label)
            rows += [(label, x, y) for x, y in b]
        pts = np.abs(np.asarray(points, dtype=float)).reshape(-1, 2)
        if len(pts):
            ax.plot(pts[:, 0], pts[:, 1], "k.", ms=5, label="data")
            rows += [("data", x, y) for x, y in pts]
        ax.plot([0, 1], [1, 0], color="0.7", lw=0.8, ls="--")
        ax.set_xlim(0, 1.02)
        ax.set_ylim(0, 1.02)
        ax.set_aspect("equal")
        ax.set_xlabel("$x$")
        ax.set_ylabel("$y$")
        if title:
            ax.set_title(title)
        if channels or len(pts):
            ax.legend(frameon=False, loc="upper right")
        fig.tight_layout()
        if out is not None:
            out = Path(out)
            fig.savefig(out, metadata={"Date": None} if out.suffix.lower() == ".svg" else None)
            write_xy_csv(out.with_suffix(".csv"), rows, header=("label", "x", "y"))
    return fig
