"""One agent's sensing, control and plant dynamics.

agent_tick is a pure function of the agent's own runtime record, a noisy
position measurement, and the two neighbor phases from the previous round's
broadcast snapshot.  It never sees swarm-wide state.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import NamedTuple

from .embedding import EmbeddingConfig, phase_of, to_embedding
from .phase_control import PhaseGains, PhaseView, phase_rate, wrap_to_pi
from .reference import PositionGains, next_target, pd_accel
from .so3 import Vec3


@dataclass(frozen=True)
class AgentState:
    """Ground-truth plant state."""

    x: Vec3  # position, m
    v: Vec3  # velocity, m/s


@dataclass(frozen=True)
class AgentRuntime:
    """Per-agent controller state carried across ticks.

    phi is the stored phase used to invert the embedding at the next tick
    (the inverse map needs a phase before the phase can be measured; using
    the previous tick's advanced phase closes that loop with one
    fixed-point step).
    """

    id: int
    lead_id: int
    lag_id: int
    phi: float
    last_broadcast_phi: float
    e_x_prev: Vec3 | None = None
    last_target: Vec3 | None = None


class SensorModel:
    """Additive white Gaussian position noise from a per-agent seeded stream."""

    def __init__(self, sigma: float, rng_seed: int):
        if sigma < 0.0:
            raise ValueError(f"sigma must be non-negative, got {sigma}")
        self.sigma = sigma
        self.rng_seed = rng_seed
        self._rng = random.Random(rng_seed)

    def measure(self, state: AgentState) -> Vec3:
        g = self._rng.gauss
        s = self.sigma
        return Vec3(state.x.x + s * g(0.0, 1.0), state.x.y + s * g(0.0, 1.0), state.x.z + s * g(0.0, 1.0))


@dataclass(frozen=True)
class ControlGains:
    position: PositionGains
    phase: PhaseGains
    # The agent's phase state integrates the commanded rate and is pulled
    # toward the measured phase by a clipped innovation each tick
    # (complementary filter).  phase_blend = 1 with no clip would re-anchor
    # fully every tick, which closes the spacing loop through the position
    # dynamics and its sample delays and is unstable at swarm-scale gaps;
    # the clip bounds how far an off-curve transient can drag the state.
    phase_blend: float = 0.05
    phase_gate: float = 0.1  # innovation clip, rad

    def __post_init__(self):
        if not (0.0 < self.phase_blend <= 1.0):
            raise ValueError("phase_blend must be in (0, 1]")
        if not (self.phase_gate > 0.0):
            raise ValueError("phase_gate must be positive")


class TickResult(NamedTuple):
    target: Vec3
    u: Vec3
    phi_broadcast: float
    omega_zdi: float
    runtime: AgentRuntime


def settle_phase(x: Vec3, cfg: EmbeddingConfig, scan: int = 96, iters: int = 40) -> float:
    """Bootstrap a self-consistent phase for a fresh agent.

    The stored phase must satisfy phi = phase_of(to_embedding(x, phi)); plain
    fixed-point iteration can diverge when the point sits far off the curve,
    so the residual's sign changes are located on a coarse scan and refined
    by bisection.  Among the solutions, the one nearest the undeformed angle
    of the world displacement wins.
    """

    def residual(phi: float) -> float:
        return wrap_to_pi(phase_of(to_embedding(x, phi, cfg)) - phi)

    guess = phase_of(x - cfg.center)
    roots = []
    prev_phi = guess
    prev_res = residual(prev_phi)
    step = 2.0 * math.pi / scan
    for k in range(1, scan + 1):
        phi = guess + k * step
        res = residual(phi)
        if res == 0.0:
            roots.append(wrap_to_pi(phi))
        elif prev_res * res < 0.0 and abs(prev_res) + abs(res) < math.pi:
            lo, hi, flo = prev_phi, phi, prev_res
            for _ in range(iters):
                mid = 0.5 * (lo + hi)
                fm = residual(mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(wrap_to_pi(0.5 * (lo + hi)))
        prev_phi, prev_res = phi, res
    if not roots:
        # No sign change found (numerically extreme offsets); fall back to a
        # few damped iterations from the undeformed angle.
        phi = guess
        for _ in range(iters):
            phi += 0.5 * residual(phi)
        return wrap_to_pi(phi)
    return min(roots, key=lambda r: abs(wrap_to_pi(r - guess)))


def agent_tick(
    rt: AgentRuntime,
    meas: Vec3,
    neighbor_phis: tuple[float, float],
    cfg: EmbeddingConfig,
    gains: ControlGains,
    dt: float,
) -> TickResult:
    """Run one control tick: invert embedding, measure phase, rate, target, PD.

    neighbor_phis is (lead phase, lag phase) from the round snapshot.
    Raises DegeneratePhase/CoincidentPhase/EvaluationError; the caller holds
    the previous target for that tick and flags telemetry.
    """
    x_hat = to_embedding(meas, rt.phi, cfg)
    phi_meas = phase_of(x_hat)
    innovation = wrap_to_pi(phi_meas - rt.phi)
    if innovation > gains.phase_gate:
        innovation = gains.phase_gate
    elif innovation < -gains.phase_gate:
        innovation = -gains.phase_gate
    phi = wrap_to_pi(rt.phi + gains.phase_blend * innovation)
    phi_k, phi_j = neighbor_phis
    # Neighbor phases come from the previous round's snapshot, so the own
    # phase in the differences must be the previous broadcast too: with a
    # fresh own phase every difference would carry a spurious omega*dt bias,
    # which at swarm-scale gaps exceeds the gap itself.
    omega_zdi = phase_rate(PhaseView(rt.last_broadcast_phi, phi_k, phi_j), gains.phase)
    target, phi_next = next_target(phi, omega_zdi, cfg, dt)
    e_x = target - meas
    u = pd_accel(e_x, rt.e_x_prev if rt.e_x_prev is not None else e_x, dt, gains.position)
    rt_next = replace(
        rt,
        phi=phi_next,
        last_broadcast_phi=phi,
        e_x_prev=e_x,
        last_target=target,
    )
    return TickResult(target, u, phi, omega_zdi, rt_next)


def held_tick(rt: AgentRuntime, meas: Vec3, gains: ControlGains, dt: float) -> TickResult:
    """Fallback tick when this round's control computation failed.

    Keeps the previous target (or hovers on the measurement when there is
    none yet), so the plant still gets a bounded command.
    """
    target = rt.last_target if rt.last_target is not None else meas
    e_x = target - meas
    u = pd_accel(e_x, rt.e_x_prev if rt.e_x_prev is not None else e_x, dt, gains.position)
    rt_next = replace(rt, e_x_prev=e_x, last_target=target)
    return TickResult(target, u, rt.last_broadcast_phi, float("nan"), rt_next)


def step_plant(state: AgentState, u: Vec3, dt: float) -> AgentState:
    """Semi-implicit Euler step of the double integrator."""
    v_next = state.v + u * dt
    return AgentState(state.x + v_next * dt, v_next)
