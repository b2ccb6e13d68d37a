"""Minimal 3D vector/matrix kernel and the rotation-group exponential map.

Everything here is a plain float computation on small immutable values; no
array library is involved, which keeps the hot simulation loop free of
per-call overhead and makes runs bit-reproducible by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SKEW_TOL = 1e-9
_SMALL_ANGLE = 1e-6


class NotSkew(ValueError):
    """Matrix is not skew-symmetric within tolerance."""


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __add__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def __mul__(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def dot(self, o: "Vec3") -> float:
        return self.x * o.x + self.y * o.y + self.z * o.z

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


ZERO3 = Vec3(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Mat3:
    """3x3 matrix, row-major nested tuples."""

    rows: tuple[
        tuple[float, float, float],
        tuple[float, float, float],
        tuple[float, float, float],
    ]

    @staticmethod
    def identity() -> "Mat3":
        return Mat3(((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))

    def transpose(self) -> "Mat3":
        r = self.rows
        return Mat3(
            (
                (r[0][0], r[1][0], r[2][0]),
                (r[0][1], r[1][1], r[2][1]),
                (r[0][2], r[1][2], r[2][2]),
            )
        )

    def apply(self, v: Vec3) -> Vec3:
        r = self.rows
        return Vec3(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )

    def __matmul__(self, o: "Mat3") -> "Mat3":
        a, b = self.rows, o.rows
        out = []
        for i in range(3):
            out.append(
                (
                    a[i][0] * b[0][0] + a[i][1] * b[1][0] + a[i][2] * b[2][0],
                    a[i][0] * b[0][1] + a[i][1] * b[1][1] + a[i][2] * b[2][1],
                    a[i][0] * b[0][2] + a[i][1] * b[1][2] + a[i][2] * b[2][2],
                )
            )
        return Mat3((out[0], out[1], out[2]))

    def det(self) -> float:
        r = self.rows
        return (
            r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
        )

    def is_finite(self) -> bool:
        return all(math.isfinite(e) for row in self.rows for e in row)


def frobenius_distance(a: Mat3, b: Mat3) -> float:
    acc = 0.0
    for i in range(3):
        for j in range(3):
            d = a.rows[i][j] - b.rows[i][j]
            acc += d * d
    return math.sqrt(acc)


@dataclass(frozen=True)
class Rotation:
    """Proper rotation matrix; orthonormality is an invariant, not a runtime check."""

    m: Mat3

    @staticmethod
    def identity() -> "Rotation":
        return Rotation(Mat3.identity())

    def apply(self, v: Vec3) -> Vec3:
        return self.m.apply(v)

    def transpose(self) -> "Rotation":
        return Rotation(self.m.transpose())

    def compose(self, o: "Rotation") -> "Rotation":
        return Rotation(self.m @ o.m)


def orthogonality_error(r: Rotation) -> float:
    """Frobenius distance of R^T R from the identity."""
    return frobenius_distance(r.m.transpose() @ r.m, Mat3.identity())


def hat(w: Vec3) -> Mat3:
    """Map an angular-velocity vector to its skew-symmetric matrix."""
    return Mat3(
        (
            (0.0, -w.z, w.y),
            (w.z, 0.0, -w.x),
            (-w.y, w.x, 0.0),
        )
    )


def vee(m: Mat3, tol: float = SKEW_TOL) -> Vec3:
    """Extract the vector of a skew-symmetric matrix (inverse of hat).

    Raises NotSkew if the symmetric part of m exceeds tol.
    """
    r = m.rows
    if (
        abs(r[0][0]) > tol
        or abs(r[1][1]) > tol
        or abs(r[2][2]) > tol
        or abs(r[0][1] + r[1][0]) > tol
        or abs(r[0][2] + r[2][0]) > tol
        or abs(r[1][2] + r[2][1]) > tol
    ):
        raise NotSkew(f"matrix is not skew-symmetric within {tol}")
    # Averaged extraction: exact (bitwise) on true skew matrices.
    return Vec3(
        (r[2][1] - r[1][2]) / 2.0,
        (r[0][2] - r[2][0]) / 2.0,
        (r[1][0] - r[0][1]) / 2.0,
    )


def exp_so3(w: Vec3) -> Rotation:
    """Closed-form (Rodrigues) exponential of the skew matrix of w.

    R = I + sin(t)/t * W + (1 - cos t)/t^2 * W^2 with t = |w|, W = hat(w).
    Below t = 1e-6 both coefficients switch to their 2nd-order Taylor
    expansions to avoid 0/0.
    """
    wx, wy, wz = w.x, w.y, w.z
    t2 = wx * wx + wy * wy + wz * wz
    t = math.sqrt(t2)
    if t < _SMALL_ANGLE:
        a = 1.0 - t2 / 6.0
        b = 0.5 - t2 / 24.0
    else:
        a = math.sin(t) / t
        b = (1.0 - math.cos(t)) / t2
    # W^2 written out: W2 = w w^T - t^2 I
    xx, yy, zz = wx * wx, wy * wy, wz * wz
    xy, xz, yz = wx * wy, wx * wz, wy * wz
    return Rotation(
        Mat3(
            (
                (1.0 - b * (yy + zz), -a * wz + b * xy, a * wy + b * xz),
                (a * wz + b * xy, 1.0 - b * (xx + zz), -a * wx + b * yz),
                (-a * wy + b * xz, a * wx + b * yz, 1.0 - b * (xx + yy)),
            )
        )
    )
