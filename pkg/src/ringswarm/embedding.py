"""Forward/inverse maps between the planar circular embedding and world space.

A point on the virtual circle at phase phi maps to the 3D trajectory by a
phase-dependent rotation (built from the deformation functions) plus the
embedding center offset.  The inverse map undoes both, given the phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .deformation import DeformationSpec
from .so3 import Rotation, Vec3, exp_so3

PHASE_EPS = 1e-12


class DegeneratePhase(ValueError):
    """Embedding-plane projection too close to the axis to define a phase."""


@dataclass(frozen=True)
class EmbeddingConfig:
    r_d: float  # desired circle radius, m
    omega_zd: float  # nominal common angular rate, rad/s
    center: Vec3  # embedding center; z component is the height h
    deformation: DeformationSpec

    def __post_init__(self):
        if not (self.r_d > 0.0):
            raise ValueError(f"r_d must be positive, got {self.r_d}")
        if not math.isfinite(self.omega_zd):
            raise ValueError("omega_zd must be finite")
        if not self.center.is_finite():
            raise ValueError("center must be finite")


def circle_point(phi: float, r: float) -> Vec3:
    """Point on the undeformed circle of radius r at phase phi."""
    return Vec3(r * math.cos(phi), r * math.sin(phi), 0.0)


def deform_rotation(phi: float, d: DeformationSpec) -> Rotation:
    """Rotation deforming the circle at phase phi: exp of (wx(phi), wy(phi), 0)."""
    wx, wy = d.rates(phi)
    return exp_so3(Vec3(wx, wy, 0.0))


def to_world(x_hat: Vec3, phi: float, cfg: EmbeddingConfig) -> Vec3:
    """Map embedding coordinates to world coordinates at phase phi."""
    return cfg.center + deform_rotation(phi, cfg.deformation).apply(x_hat)


def to_embedding(x: Vec3, phi: float, cfg: EmbeddingConfig) -> Vec3:
    """Inverse of to_world at the same phase."""
    return deform_rotation(phi, cfg.deformation).transpose().apply(x - cfg.center)


def phase_of(x_hat: Vec3) -> float:
    """Phase angle of an embedding-space point, in (-pi, pi].

    Raises DegeneratePhase when the point projects onto the embedding axis.
    """
    if math.hypot(x_hat.x, x_hat.y) <= PHASE_EPS:
        raise DegeneratePhase("point projects onto the embedding axis")
    phi = math.atan2(x_hat.y, x_hat.x)
    return math.pi if phi <= -math.pi else phi
