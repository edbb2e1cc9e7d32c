"""Matplotlib figures written next to the tabular output."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .report import series_values  # noqa: E402

__all__ = ["plot_series", "plot_run_diagnostics", "plot_sweep"]

_LABELS = {
    "best-fitness": "best fitness so far",
    "davg": "normalized average distance to best probe",
    "best-probe": "best probe number",
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def plot_series(trace, kind: str, path, title: Optional[str] = None) -> Path:
    rows = series_values(trace, kind)
    steps = [s for s, _ in rows]
    values = [v for _, v in rows]
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    if kind == "best-probe":
        ax.plot(steps, values, ".", ms=3)
    else:
        ax.plot(steps, values, "-", lw=1.2)
    if kind == "davg" and min(values) > 0:
        ax.set_yscale("log")
    ax.set_xlabel("time step")
    ax.set_ylabel(_LABELS[kind])
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_run_diagnostics(trace, out_dir, stem: str, title: Optional[str] = None) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    paths = {}
    for kind in ("best-fitness", "davg", "best-probe"):
        paths[kind] = plot_series(trace, kind, out_dir / f"{stem}_{kind}.png", title)
    return paths


def plot_sweep(sweep, path, title: Optional[str] = None) -> Path:
    """Best fitness against gamma, one line per probes-per-axis value."""
    groups: Dict[int, list] = {}
    for rec in sweep.records:
        ppa = rec.probes_per_axis or rec.np // rec.nd
        groups.setdefault(ppa, []).append(rec)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    for ppa, recs in sorted(groups.items()):
        g = [r.gamma for r in recs]
        ax1.plot(g, [r.best_fitness for r in recs], "o-", ms=3, lw=1, label=f"Np/Nd={ppa}")
        ax2.plot(g, [r.neval for r in recs], "o-", ms=3, lw=1, label=f"Np/Nd={ppa}")
    best = sweep.best_record
    if best is not None:
        ax1.plot([best.gamma], [best.best_fitness], "k*", ms=10, label=f"best (run {best.run_number})")
    ax1.set_xlabel("gamma")
    ax1.set_ylabel("best fitness")
    ax2.set_xlabel("gamma")
    ax2.set_ylabel("function evaluations")
    ax1.legend(fontsize=7)
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    fig.suptitle(title or sweep.function_id, fontsize=10)
    return _save(fig, path)
