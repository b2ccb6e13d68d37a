"""Position-only reference generation and the PD tracking law.

The next target is produced by rotating the agent's current on-circle
position one tick forward about the z axis, then mapping through the
deformation at the advanced phase.  The PD derivative term is a backward
difference of the position error, so no velocity sensing is required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .embedding import EmbeddingConfig, circle_point, phase_of, to_world
from .so3 import Vec3, exp_so3

DEFAULT_K_X = 6.0
DEFAULT_K_V = 6.5 * math.sqrt(2.0)


@dataclass(frozen=True)
class PositionGains:
    k_x: float = DEFAULT_K_X  # 1/s^2
    k_v: float = DEFAULT_K_V  # 1/s

    def __post_init__(self):
        if not (self.k_x > 0.0 and self.k_v > 0.0):
            raise ValueError("position gains must be positive")


def desired_on_circle(phi: float, r_d: float) -> Vec3:
    """Desired embedding-plane position at phase phi."""
    return circle_point(phi, r_d)


def advance_phase(phi: float, omega_zdi: float, dt: float, r_d: float) -> float:
    """Advance phi by one tick of rotation at omega_zdi about the z axis.

    Implemented as an incremental rotation applied to the on-circle point
    with the phase re-extracted by atan2, so it shares the exact arithmetic
    of the embedding pipeline.  Result is in (-pi, pi].
    """
    dr = exp_so3(Vec3(0.0, 0.0, omega_zdi * dt))
    return phase_of(dr.apply(desired_on_circle(phi, r_d)))


def next_target(
    phi: float, omega_zdi: float, cfg: EmbeddingConfig, dt: float
) -> tuple[Vec3, float]:
    """World-space target for the next tick plus the advanced phase.

    The deformation rotation is evaluated at the advanced phase, not the
    current one.
    """
    phi_next = advance_phase(phi, omega_zdi, dt, cfg.r_d)
    x_hat_next = desired_on_circle(phi_next, cfg.r_d)
    return to_world(x_hat_next, phi_next, cfg), phi_next


def pd_accel(e_x: Vec3, e_x_prev: Vec3, dt: float, g: PositionGains) -> Vec3:
    """PD acceleration from the position error and its backward difference."""
    return e_x * g.k_x + (e_x - e_x_prev) * (g.k_v / dt)
