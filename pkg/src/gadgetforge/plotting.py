"""Log-log plots of convergence sweeps, rendered off-screen with the Agg canvas."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .schrieffer_wolff import SweepResult


def _points(result: SweepResult, field: str) -> tuple[np.ndarray, np.ndarray]:
    rows = [r for r in result.rows if r.rank_match and getattr(r, field) and getattr(r, field) > 0]
    return np.array([r.delta for r in rows]), np.array([getattr(r, field) for r in rows])


def sweep_figure(results: list[SweepResult], title: str | None = None) -> Figure:
    fig = Figure(figsize=(6.4, 4.4))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(1, 1, 1)
    for res in results:
        x, y = _points(res, "eps")
        if x.size == 0:
            continue
        slope = "n/a" if res.slope is None else f"{res.slope:.3f}"
        ax.loglog(x, y, "o-", label=f"order {res.order}: {res.gadget} (slope {slope})")
        xe, ye = _points(res, "eta")
        if xe.size:
            ax.loglog(xe, ye, ":", color=ax.lines[-1].get_color(), alpha=0.6)
    ax.set_xlabel(r"$\Delta$")
    ax.set_ylabel(r"$\epsilon$ (solid), $\eta$ (dotted)")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if ax.lines:
        ax.legend(fontsize="small")
    fig.tight_layout()
    return fig


def save_sweep_plot(results: list[SweepResult], path, title: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps the PNG bytes reproducible
    sweep_figure(results, title).savefig(path, dpi=120, metadata={"Software": None})
    return path
