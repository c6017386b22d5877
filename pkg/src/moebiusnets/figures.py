"""Figure rendering for nets and verification reports (file output only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .moebius import POINT_AT_INFINITY, project

__all__ = ["render_net", "render_report"]


def _finite_coords(net, store):
    out = {}
    for t in net.lattice.vertices():
        c = project(store[t])
        if c is not POINT_AT_INFINITY:
            out[t] = np.asarray(c)[:3]
    return out


def render_net(net, path, title: str = "") -> Path:
    """Wireframe of the point net (first three coordinates), one PNG file.

    Edges of the lattice are drawn as segments; the companion net, when it is
    not the constant infinity class, is overlaid in a second color.
    """
    path = Path(path)
    three_d = net.algebra.n >= 3
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(111, projection="3d" if three_d else None)
    for store, color, label in ((net.f, "tab:blue", "F"), (net.fhat, "tab:red", "companion")):
        coords = _finite_coords(net, store)
        if len(coords) < 2 or (store is net.fhat and net.euclidean):
            continue
        segments = 0
        for t, j in net.lattice.edges():
            nxt = net.lattice.shift(t, j)
            if t in coords and nxt in coords:
                seg = np.stack([coords[t], coords[nxt]])
                ax.plot(*(seg.T), color=color, linewidth=0.8, alpha=0.8,
                        label=label if segments == 0 else None)
                segments += 1
    ax.set_title(title or "coordinate net")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_report(report, path) -> Path:
    """Log-scale bar chart of residual maxima against their tolerances."""
    path = Path(path)
    names = [c.name for c in report.checks]
    values = [max(c.value, 1e-18) for c in report.checks]
    tols = [c.tolerance for c in report.checks]
    colors = ["tab:green" if c.passed else "tab:red" for c in report.checks]
    fig, ax = plt.subplots(figsize=(8, 0.45 * len(names) + 1.5))
    y = np.arange(len(names))
    ax.barh(y, values, color=colors)
    for yi, tol in zip(y, tols):
        ax.plot([tol, tol], [yi - 0.4, yi + 0.4], color="black", linewidth=1.2)
    ax.set_yticks(y, names, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("worst scaled residual (bar) vs tolerance (tick)")
    ax.set_title(f"verification: {'pass' if report.passed else 'FAIL'}")
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
