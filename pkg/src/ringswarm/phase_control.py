"""Decentralized phase-spacing control.

Each agent adjusts its angular rate from the inverse of the (wrapped) phase
differences to its lead and lag neighbors, which acts like electrostatic
repulsion on the ring: crowding a neighbor produces a strong corrective rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class CoincidentPhase(ArithmeticError):
    """Two agents share a phase exactly; the repulsion direction is undefined."""


@dataclass(frozen=True)
class PhaseView:
    """One agent's phase plus its two neighbors' phases, all in (-pi, pi]."""

    phi_i: float  # own
    phi_k: float  # leading neighbor (ahead on the ring)
    phi_j: float  # lagging neighbor (behind on the ring)


@dataclass(frozen=True)
class PhaseGains:
    k_phi: float  # repulsion gain, rad^2/s
    omega_zd: float  # nominal common rate, rad/s
    eps_clamp: float = 1e-3  # singularity guard on phase differences, rad
    omega_cap: float | None = None  # None -> 10*|omega_zd|

    def __post_init__(self):
        if not (self.k_phi > 0.0):
            raise ValueError(f"k_phi must be positive, got {self.k_phi}")
        if not (self.eps_clamp > 0.0):
            raise ValueError(f"eps_clamp must be positive, got {self.eps_clamp}")

    def cap(self) -> float:
        return self.omega_cap if self.omega_cap is not None else 10.0 * abs(self.omega_zd)


def wrap_to_pi(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    r = math.remainder(theta, math.tau)
    return math.pi if r <= -math.pi else r


def _clamped(d: float, eps: float) -> float:
    if d == 0.0:
        raise CoincidentPhase("phase difference is exactly zero")
    if abs(d) < eps:
        return math.copysign(eps, d)
    return d


def phase_rate(view: PhaseView, g: PhaseGains) -> float:
    """Commanded angular rate from neighbor phase differences.

    omega = omega_zd + k_phi * (1/d_lead + 1/d_lag) on wrapped differences,
    with each difference clamped away from zero and the result saturated to
    omega_zd +/- cap so one tick can never jump an agent across the ring.
    """
    d_lead = _clamped(wrap_to_pi(view.phi_i - view.phi_k), g.eps_clamp)
    d_lag = _clamped(wrap_to_pi(view.phi_i - view.phi_j), g.eps_clamp)
    rate = g.omega_zd + g.k_phi * (1.0 / d_lead + 1.0 / d_lag)
    cap = g.cap()
    lo, hi = g.omega_zd - cap, g.omega_zd + cap
    return lo if rate < lo else hi if rate > hi else rate


def lyapunov_value(separations: Sequence[tuple[float, float]]) -> float:
    """Spacing-energy sum over agents of 0.5*(1/e_lag + 1/e_lead)^2.

    separations holds one (e_ji, e_ki) pair per agent: the wrapped phase
    differences to the lagging and leading neighbor.  Zero exactly at uniform
    spacing, positive elsewhere.
    """
    total = 0.0
    for e_ji, e_ki in separations:
        if e_ji == 0.0 or e_ki == 0.0:
            raise CoincidentPhase("phase difference is exactly zero")
        term = 1.0 / e_ji + 1.0 / e_ki
        total += 0.5 * term * term
    return total


def ring_separation_pairs(phases: Sequence[float]) -> list[tuple[float, float]]:
    """Per-agent (e_ji, e_ki) pairs for a ring ordered by ascending phase."""
    n = len(phases)
    order = sorted(range(n), key=lambda i: (phases[i], i))
    pairs: list[tuple[float, float] | None] = [None] * n
    for r, i in enumerate(order):
        lead = order[(r + 1) % n]
        lag = order[(r - 1) % n]
        pairs[i] = (
            wrap_to_pi(phases[i] - phases[lag]),
            wrap_to_pi(phases[i] - phases[lead]),
        )
    return pairs  # type: ignore[return-value]


@dataclass(frozen=True)
class PhaseRingResult:
    phases: list[list[float]]  # per step (including initial), wrapped
    rates: list[list[float]]  # per step, commanded rates
    lyapunov: list[float]  # per step (including initial)


def simulate_phase_ring(
    phases0: Sequence[float], gains: PhaseGains, dt: float, steps: int
) -> PhaseRingResult:
    """Kinematic ring of phases advanced directly by the commanded rates.

    This is the idealized common-plane rotation the spacing law is designed
    for: no plant, no noise, synchronous updates against a per-step snapshot.
    The neighbor assignment is fixed from the initial ordering.
    """
    n = len(phases0)
    if n < 2:
        raise ValueError("need at least two agents on the ring")
    order = sorted(range(n), key=lambda i: (phases0[i], i))
    lead = [0] * n
    lag = [0] * n
    for r, i in enumerate(order):
        lead[i] = order[(r + 1) % n]
        lag[i] = order[(r - 1) % n]

    def energy(ph: Sequence[float]) -> float:
        return lyapunov_value(
            [(wrap_to_pi(ph[i] - ph[lag[i]]), wrap_to_pi(ph[i] - ph[lead[i]])) for i in range(n)]
        )

    phases = [wrap_to_pi(p) for p in phases0]
    traj = [list(phases)]
    rates_hist: list[list[float]] = []
    values = [energy(phases)]
    for _ in range(steps):
        snapshot = list(phases)
        rates = [
            phase_rate(PhaseView(snapshot[i], snapshot[lead[i]], snapshot[lag[i]]), gains)
            for i in range(n)
        ]
        phases = [wrap_to_pi(snapshot[i] + rates[i] * dt) for i in range(n)]
        traj.append(list(phases))
        rates_hist.append(rates)
        values.append(energy(phases))
    return PhaseRingResult(traj, rates_hist, values)
