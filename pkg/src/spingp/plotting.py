"""
Static figures for command tables.

matplotlib is imported lazily so the numerical modules never depend on it.
"""

from __future__ import annotations

import math

import numpy as np

from .output import Table

__all__ = ["render_figure"]

_RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.4,
    "svg.hashsalt": "spingp",
}


def _groups(table):
    # legend labels with short numbers
    for label, rows in table.groups():
        key, _, val = label.partition("=")
        try:
            label = f"{key}={float(val):.5g}"
        except ValueError:
            pass
        yield label, rows


def _finite(rows, col):
    return np.array([r[col] if isinstance(r[col], (int, float)) else np.nan for r in rows], float)


def _theta_axis(ax):
    ax.set_xlim(0.0, math.pi)
    ax.set_xticks([0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi])
    ax.set_xticklabels(["0", r"$\pi/4$", r"$\pi/2$", r"$3\pi/4$", r"$\pi$"])
    ax.set_xlabel(r"$\theta$")


def _resonant(fig, table):
    ax = fig.add_subplot(111)
    styles = iter(["-", "--", ":", "-."] * 4)
    ideal = None
    for label, rows in _groups(table):
        th = _finite(rows, "theta")
        ax.plot(th, _finite(rows, "gp_per_turn"), next(styles), color="tab:blue", label=label)
        ideal = (th, _finite(rows, "gp_ideal"))
    if ideal is not None:
        ax.plot(*ideal, color="tab:red", label=r"$-\pi(1-\cos\theta)$")
    _theta_axis(ax)
    ax.set_ylabel(r"$\gamma^{(ii)}/\xi$")
    ax.set_ylim(-2 * math.pi, 0.0)
    ax.legend(loc="lower left")


def _prebarrier(fig, table):
    ax = fig.add_subplot(111)
    colors = iter(["tab:blue", "tab:red", "tab:green", "tab:purple"] * 4)
    for label, rows in _groups(table):
        c = next(colors)
        eps = _finite(rows, "epsilon")
        ax.plot(eps, _finite(rows, "gamma_i"), color=c, label=label)
        marks = [r for r in rows if r["resonance"]]
        if marks:
            ax.plot(_finite(marks, "epsilon"), _finite(marks, "gamma_i"), "o", color=c, ms=4)
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel(r"$V_0/E$")
    ax.set_ylabel(r"$\gamma^{(i)}$ per cycle")
    ax.legend(loc="best")


def _tunnel(fig, table):
    ax = fig.add_subplot(111)
    styles = iter(["-", "--", ":", "-."] * 4)
    for label, rows in _groups(table):
        ax.plot(_finite(rows, "theta"), _finite(rows, "gamma"), next(styles), color="k", label=label)
    _theta_axis(ax)
    ax.set_ylabel(r"$\gamma^{(ii)}$")
    ax.legend(loc="best")


def _trajectory(fig, table):
    ax = fig.add_subplot(111, projection="3d")
    u, v = np.mgrid[0 : 2 * np.pi : 37j, 0 : np.pi : 19j]
    ax.plot_wireframe(np.cos(u) * np.sin(v), np.sin(u) * np.sin(v), np.cos(v), color="0.85", lw=0.4)
    colors = iter(["tab:blue", "tab:red", "tab:green", "tab:purple"] * 4)
    for label, rows in _groups(table):
        c = next(colors)
        nx, ny, nz = (_finite(rows, k) for k in ("n_x", "n_y", "n_z"))
        ax.plot(nx, ny, nz, color=c, label=label)
        ax.scatter([nx[0]], [ny[0]], [nz[0]], color=c, s=12)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_box_aspect((1, 1, 1))
    ax.legend(loc="upper left")


def _generic(fig, table):
    ax = fig.add_subplot(111)
    xcol, ycols = table.plot["x"], table.plot["y"]
    for label, rows in _groups(table):
        for ycol in ycols:
            ax.plot(_finite(rows, xcol), _finite(rows, ycol), label=f"{label} {ycol}".strip())
    ax.set_xlabel(xcol)
    ax.legend(loc="best")


_DRAW = {
    "resonant-gp": _resonant,
    "prebarrier-gp": _prebarrier,
    "tunnel-gp": _tunnel,
    "trajectory": _trajectory,
}


def render_figure(table: Table, path, dpi=150):
    """Draw ``table`` and save it to ``path`` (format from the suffix)."""
    if not table.plot:
        raise ValueError(f"{table.command} output has no figure")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with plt.rc_context(_RC):
        fig = plt.figure(figsize=(5.5, 4.0))
        try:
            _DRAW.get(table.command, _generic)(fig, table)
            fig.tight_layout()
            path = str(path)
            meta = {"Software": None}
            if path.endswith(".pdf"):
                meta = {"Creator": None, "Producer": None, "CreationDate": None}
            elif path.endswith(".svg"):
                meta = {"Date": None, "Creator": None}
            fig.savefig(path, dpi=dpi, metadata=meta)
        finally:
            plt.close(fig)
    return path
