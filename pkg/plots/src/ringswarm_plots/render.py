"""The five figure kinds rendered from telemetry."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reader import SchemaError, Telemetry, read_telemetry

PLOT_KINDS = ("traj3d", "axes_time", "separations", "distances", "lyapunov")


def render(kind: str, in_path: str | Path, out_path: str | Path, agent: int | None = None) -> None:
    """Render one figure kind from a telemetry CSV to an image file."""
    if kind not in PLOT_KINDS:
        raise SchemaError(f"unknown plot kind {kind!r}; choose from {', '.join(PLOT_KINDS)}")
    data = read_telemetry(in_path)
    fig = _RENDERERS[kind](data, agent)
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def _pick_agent(data: Telemetry, agent: int | None) -> int:
    if agent is None:
        return int(data.agent_ids[0])
    if agent not in data.agent_ids:
        raise SchemaError(f"no rows for agent {agent}")
    return agent


def _traj3d(data: Telemetry, agent: int | None):
    aid = _pick_agent(data, agent)
    a = data.agent(aid)
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(111, projection="3d")
    ax.plot(*a.target.T, color="tab:orange", lw=1.2, ls="--", label="desired")
    ax.plot(*a.pos.T, color="tab:blue", lw=1.0, label="actual")
    # projections of the actual path, drawn as red dotted curves on the box walls
    x, y, z = a.pos.T
    z0 = float(z.min())
    x0 = float(x.min())
    ax.plot(x, y, np.full_like(z, z0), "r:", lw=0.8)  # XY floor
    ax.plot(np.full_like(x, x0), y, z, "r:", lw=0.8)  # YZ wall
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_zlabel("z [m]")
    ax.set_title(f"agent {aid}: desired vs actual trajectory")
    ax.legend(loc="upper left")
    return fig


def _axes_time(data: Telemetry, agent: int | None):
    aid = _pick_agent(data, agent)
    a = data.agent(aid)
    fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
    for k, name in enumerate("xyz"):
        axes[k].plot(a.t, a.target[:, k], color="tab:orange", ls="--", lw=1.0, label="desired")
        axes[k].plot(a.t, a.pos[:, k], color="tab:blue", lw=0.9, label="actual")
        axes[k].set_ylabel(f"{name} [m]")
        axes[k].grid(True, alpha=0.3)
    axes[0].set_title(f"agent {aid}: position components vs time")
    axes[0].legend(loc="upper right")
    axes[2].set_xlabel("t [s]")
    return fig


def _per_tick_separations(data: Telemetry):
    times = data.times
    max_n = 0
    seps = []
    for t in times:
        rows = data.rows_at(t)
        phis = np.sort(data.phi[rows])
        gaps = np.degrees(np.diff(np.concatenate([phis, [phis[0] + 2 * math.pi]])))
        seps.append(gaps)
        max_n = max(max_n, len(gaps))
    grid = np.full((len(times), max_n), np.nan)
    for i, gaps in enumerate(seps):
        grid[i, : len(gaps)] = gaps
    return times, grid


def _separations(data: Telemetry, agent: int | None):
    times, grid = _per_tick_separations(data)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for k in range(grid.shape[1]):
        ax.plot(times, grid[:, k], lw=0.8)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("adjacent separation [deg]")
    ax.set_title("phase separations")
    ax.grid(True, alpha=0.3)
    return fig


def _distances(data: Telemetry, agent: int | None):
    times = data.times
    n_max = len(data.agent_ids)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if n_max <= 6:
        # few agents: every unordered pair as its own series
        series: dict[tuple[int, int], list[tuple[float, float]]] = {}
        for t in times:
            rows = data.rows_at(t)
            ids = data.agent_id[rows]
            pos = data.pos[rows]
            for i in range(len(ids)):
                for j in range(i + 1, len(ids)):
                    key = (min(ids[i], ids[j]), max(ids[i], ids[j]))
                    d = float(np.linalg.norm(pos[i] - pos[j]))
                    series.setdefault(key, []).append((float(t), d))
        for (a, b), pts in sorted(series.items()):
            arr = np.asarray(pts)
            ax.plot(arr[:, 0], arr[:, 1], lw=0.9, label=f"{a}-{b}")
        ax.legend(fontsize=7, ncol=2)
    else:
        lo, hi = [], []
        for t in times:
            rows = data.rows_at(t)
            pos = data.pos[rows]
            diff = pos[:, None, :] - pos[None, :, :]
            d = np.linalg.norm(diff, axis=2)
            iu = np.triu_indices(len(pos), k=1)
            lo.append(d[iu].min())
            hi.append(d[iu].max())
        ax.plot(times, lo, label="min pair")
        ax.plot(times, hi, label="max pair")
        ax.legend()
    ax.set_xlabel("t [s]")
    ax.set_ylabel("pairwise distance [m]")
    ax.set_title("inter-agent distances")
    ax.grid(True, alpha=0.3)
    return fig


def _lyapunov(data: Telemetry, agent: int | None):
    times = data.times
    values = []
    for t in times:
        rows = data.rows_at(t)
        phis = np.sort(data.phi[rows])
        gaps = np.diff(np.concatenate([phis, [phis[0] + 2 * math.pi]]))
        # per-agent (lag, lead) differences around the sorted ring
        lead = -gaps
        lag = np.roll(gaps, 1)
        with np.errstate(divide="ignore"):
            terms = 1.0 / lag + 1.0 / lead
        values.append(0.5 * float(np.sum(terms**2)))
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(times, values)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("spacing energy")
    ax.set_yscale("log")
    ax.set_title("ring spacing energy")
    ax.grid(True, alpha=0.3, which="both")
    return fig


_RENDERERS = {
    "traj3d": _traj3d,
    "axes_time": _axes_time,
    "separations": _separations,
    "distances": _distances,
    "lyapunov": _lyapunov,
}
