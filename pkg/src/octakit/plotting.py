"""Figures and CSV tables written next to a report."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_MARKERS = {"zN": "^", "zW": "<", "zS": "v", "zE": ">"}


def plot_shapes(quads, path) -> Path:
    """Shape parameters in the complex plane, with the unit circle for reference."""
    fig, ax = plt.subplots(figsize=(5, 5))
    t = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(t), np.sin(t), color="0.7", lw=1)
    for name, marker in _MARKERS.items():
        zs = np.array([getattr(q, name) for q in quads], dtype=complex)
        if zs.size:
            ax.scatter(zs.real, zs.imag, marker=marker, label=name, s=40)
    for k, q in enumerate(quads):
        ax.annotate(str(k), (q.zN.real, q.zN.imag), fontsize=7, xytext=(3, 3), textcoords="offset points")
    ax.axhline(0, color="0.85", lw=0.8)
    ax.axvline(0, color="0.85", lw=0.8)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title("Shape parameters per crossing")
    ax.set_aspect("equal", adjustable="datalim")
    if quads:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_residuals(series: dict, tol: float, path) -> Path:
    """Per-crossing residuals on a log scale, one group of bars per series."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    names = sorted(series)
    width = 0.8 / max(1, len(names))
    for j, name in enumerate(names):
        vals = np.maximum(np.asarray(series[name], dtype=float), 1e-18)
        x = np.arange(len(vals)) + j * width
        ax.bar(x, vals, width=width, label=name)
    ax.axhline(tol, color="k", ls="--", lw=1, label=f"tolerance {tol:g}")
    ax.set_yscale("log")
    ax.set_xlabel("crossing")
    ax.set_ylabel("residual")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return path
