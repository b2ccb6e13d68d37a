"""Evaluation quantities computed from telemetry.

All series are reconstructed from the per-tick broadcast phases and
positions, so the same code path serves the harness (in-memory records) and
the CLI `metrics` subcommand (records re-read from CSV).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .phase_control import ring_separation_pairs
from .so3 import Vec3
from .telemetry import TelemetryRecord

DEFAULT_HOLD_S = 2.0
SMALL_N_BAND_DEG = 5.0
LARGE_N_BAND_DEG = 1.0
_SMALL_N = 10


def default_band_deg(n: int) -> float:
    """Convergence band: 5 degrees for small rings, 1 degree for large ones."""
    return SMALL_N_BAND_DEG if n < _SMALL_N else LARGE_N_BAND_DEG


def separations(phases: list[float]) -> list[float]:
    """Adjacent phase separations around the sorted ring, in degrees.

    n values in [0, 360) that sum to 360.
    """
    n = len(phases)
    if n < 2:
        raise ValueError("need at least two phases")
    ordered = sorted(phases)
    gaps = []
    for r in range(n):
        nxt = ordered[(r + 1) % n]
        d = (nxt - ordered[r]) % (2.0 * math.pi)
        gaps.append(math.degrees(d))
    return gaps


def min_pairwise_distance(positions: list[Vec3]) -> float:
    if len(positions) < 2:
        raise ValueError("need at least two positions")
    best = math.inf
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            d = (positions[i] - positions[j]).norm()
            if d < best:
                best = d
    return best


def max_pairwise_distance(positions: list[Vec3]) -> float:
    if len(positions) < 2:
        raise ValueError("need at least two positions")
    best = 0.0
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            d = (positions[i] - positions[j]).norm()
            if d > best:
                best = d
    return best


def spacing_energy(phases: list[float]) -> float:
    """Lyapunov-style spacing energy of a sorted-ring configuration."""
    try:
        pairs = ring_separation_pairs(phases)
    except Exception:
        return math.inf
    total = 0.0
    for e_ji, e_ki in pairs:
        if e_ji == 0.0 or e_ki == 0.0:
            return math.inf
        term = 1.0 / e_ji + 1.0 / e_ki
        total += 0.5 * term * term
    return total


def convergence_time(
    times: list[float],
    separation_series: list[list[float]],
    n: int,
    band_deg: float,
    hold_s: float,
) -> float | None:
    """First time from which every separation stays within +/-band of 360/n
    for at least hold_s.  Times are absolute; returns the entry time or None.
    """
    if band_deg <= 0.0:
        raise ValueError("band must be positive")
    target = 360.0 / n
    ok = [
        all(abs(s - target) <= band_deg for s in seps) and len(seps) == n
        for seps in separation_series
    ]
    for k, t in enumerate(times):
        if not ok[k]:
            continue
        end = t + hold_s
        j = k
        good = True
        while j < len(times) and times[j] <= end + 1e-9:
            if not ok[j]:
                good = False
                break
            j += 1
        if good and (j < len(times) or times[-1] + 1e-9 >= end):
            return t
    return None


@dataclass(frozen=True)
class EpochSummary:
    """Metrics over one stretch with a constant agent set."""

    t_start: float
    t_end: float
    n_agents: int
    target_separation_deg: float
    convergence_time_s: float | None  # relative to t_start
    steady_oscillation_deg: float | None
    min_distance_m: float
    max_distance_m: float
    steady_min_distance_m: float | None

    def to_dict(self) -> dict:
        return {
            "t_start": self.t_start,
            "t_end": self.t_end,
            "n_agents": self.n_agents,
            "target_separation_deg": self.target_separation_deg,
            "convergence_time_s": self.convergence_time_s,
            "steady_oscillation_deg": self.steady_oscillation_deg,
            "min_distance_m": self.min_distance_m,
            "max_distance_m": self.max_distance_m,
            "steady_min_distance_m": self.steady_min_distance_m,
        }


@dataclass
class MetricsSummary:
    times: list[float]
    separations_deg: list[list[float]]  # per tick, sorted ring order
    min_dist_m: list[float]
    max_dist_m: list[float]
    lyapunov: list[float]
    tracking_err: dict[int, list[tuple[float, float]]]  # id -> [(t, |x - x_d|)]
    epochs: list[EpochSummary]
    band_deg: float
    hold_s: float
    flags_seen: list[str] = field(default_factory=list)

    @property
    def final(self) -> EpochSummary:
        return self.epochs[-1]

    def to_dict(self) -> dict:
        last = self.final
        return {
            "convergence_time_s": last.convergence_time_s,
            "steady_oscillation_deg": last.steady_oscillation_deg,
            "min_distance_m": min(self.min_dist_m),
            "max_distance_m": max(self.max_dist_m),
            "steady_min_distance_m": last.steady_min_distance_m,
            "final_separations_deg": self.separations_deg[-1],
            "lyapunov_final": _json_float(self.lyapunov[-1]),
            "n_agents_final": last.n_agents,
            "target_separation_deg": last.target_separation_deg,
            "band_deg": self.band_deg,
            "hold_s": self.hold_s,
            "flags_seen": self.flags_seen,
            "epochs": [e.to_dict() for e in self.epochs],
        }


def _json_float(v: float) -> float | str:
    return v if math.isfinite(v) else repr(v)


def summarize(
    records: list[TelemetryRecord],
    band_deg: float | None = None,
    hold_s: float = DEFAULT_HOLD_S,
) -> MetricsSummary:
    """Build the full metrics summary from telemetry records.

    Epochs are split wherever the set of live agent ids changes (insertion
    or removal); scalar headline values come from the final epoch.
    """
    if not records:
        raise ValueError("no telemetry records")

    # Group by tick, preserving time order.
    by_tick: list[tuple[float, list[TelemetryRecord]]] = []
    for r in records:
        if by_tick and by_tick[-1][0] == r.t:
            by_tick[-1][1].append(r)
        else:
            by_tick.append((r.t, [r]))

    times: list[float] = []
    seps: list[list[float]] = []
    mind: list[float] = []
    maxd: list[float] = []
    lyap: list[float] = []
    idsets: list[frozenset[int]] = []
    tracking: dict[int, list[tuple[float, float]]] = {}
    flags_seen: set[str] = set()

    for t, rows in by_tick:
        phases = [r.phi for r in rows]
        positions = [r.x for r in rows]
        times.append(t)
        seps.append(separations(phases))
        mind.append(min_pairwise_distance(positions))
        maxd.append(max_pairwise_distance(positions))
        lyap.append(spacing_energy(phases))
        idsets.append(frozenset(r.agent_id for r in rows))
        for r in rows:
            tracking.setdefault(r.agent_id, []).append((t, (r.x - r.x_d).norm()))
            if r.flags:
                for fl in r.flags.split("|"):
                    flags_seen.add(fl)

    # Epoch boundaries where the live-agent set changes.
    starts = [0]
    for k in range(1, len(by_tick)):
        if idsets[k] != idsets[k - 1]:
            starts.append(k)
    starts.append(len(by_tick))

    epochs: list[EpochSummary] = []
    for a, b in zip(starts[:-1], starts[1:]):
        n = len(idsets[a])
        band = band_deg if band_deg is not None else default_band_deg(n)
        t0 = times[a]
        conv_abs = convergence_time(times[a:b], seps[a:b], n, band, hold_s)
        conv_rel = None if conv_abs is None else conv_abs - t0
        target = 360.0 / n
        steady_osc = None
        steady_min = None
        if conv_abs is not None:
            tail = [k for k in range(a, b) if times[k] >= conv_abs]
            steady_osc = max(abs(s - target) for k in tail for s in seps[k])
            steady_min = min(mind[k] for k in tail)
        epochs.append(
            EpochSummary(
                t_start=t0,
                t_end=times[b - 1],
                n_agents=n,
                target_separation_deg=target,
                convergence_time_s=conv_rel,
                steady_oscillation_deg=steady_osc,
                min_distance_m=min(mind[a:b]),
                max_distance_m=max(maxd[a:b]),
                steady_min_distance_m=steady_min,
            )
        )

    band = band_deg if band_deg is not None else default_band_deg(len(idsets[-1]))
    return MetricsSummary(
        times=times,
        separations_deg=seps,
        min_dist_m=mind,
        max_dist_m=maxd,
        lyapunov=lyap,
        tracking_err=tracking,
        epochs=epochs,
        band_deg=band,
        hold_s=hold_s,
        flags_seen=sorted(flags_seen),
    )
