"""SU(2) rotors, SO(3) matrices, exp/log maps, lifts and connected traces.

A rotor is a unit quaternion ``(w, v)``.  The SU(2) element
``exp(a n.tau)`` with ``tau_k = -(i/2) sigma_k`` corresponds to the rotor
``(cos(a/2), sin(a/2) n)``, and conjugation ``x -> q x q^-1`` rotates
3-vectors right-handedly by ``a`` about ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateRotor, IdentityRotation, InvalidInput

NORM_TOL = 1e-12
AXIS_TOL = 1e-12
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class Rotor:
    w: float
    v: tuple[float, float, float]

    def __post_init__(self):
        v = tuple(float(x) for x in self.v)
        if len(v) != 3:
            raise InvalidInput("rotor vector part must have 3 components")
        object.__setattr__(self, "w", float(self.w))
        object.__setattr__(self, "v", v)
        if abs(self.w**2 + sum(x * x for x in v) - 1.0) > 1e-9:
            raise InvalidInput("rotor is not unit norm")

    @classmethod
    def from_array(cls, arr, normalize: bool = True) -> "Rotor":
        a = np.asarray(arr, dtype=float).reshape(4)
        if normalize:
            n = np.linalg.norm(a)
            if n == 0:
                raise InvalidInput("zero quaternion")
            a = a / n
        return cls(a[0], (a[1], a[2], a[3]))

    @classmethod
    def identity(cls) -> "Rotor":
        return cls(1.0, (0.0, 0.0, 0.0))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, *self.v])

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.v)

    def __mul__(self, other: "Rotor") -> "Rotor":
        w1, v1 = self.w, self.vec
        w2, v2 = other.w, other.vec
        w = w1 * w2 - v1 @ v2
        v = w1 * v2 + w2 * v1 + np.cross(v1, v2)
        return Rotor.from_array([w, *v])

    def __neg__(self) -> "Rotor":
        return Rotor(-self.w, tuple(-x for x in self.v))

    def inverse(self) -> "Rotor":
        return Rotor(self.w, tuple(-x for x in self.v))

    def rotate(self, x) -> np.ndarray:
        return rotor_to_rotation(self) @ np.asarray(x, dtype=float)


@dataclass(frozen=True)
class AxisAngle:
    angle: float
    axis: tuple[float, float, float]

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float).reshape(3)
        if abs(np.linalg.norm(axis) - 1.0) > AXIS_TOL * 1e3:
            raise InvalidInput("axis must be a unit vector")
        if not 0.0 < self.angle < 2 * np.pi:
            raise InvalidInput("angle must lie in (0, 2pi)")
        object.__setattr__(self, "angle", float(self.angle))
        object.__setattr__(self, "axis", tuple(float(x) for x in axis))

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.axis)

    def flipped(self) -> "AxisAngle":
        """The other parametrization of the same rotation."""
        return AxisAngle(2 * np.pi - self.angle, tuple(-x for x in self.axis))


def exp_su2(aa: AxisAngle) -> Rotor:
    half = 0.5 * aa.angle
    return Rotor.from_array([np.cos(half), *(np.sin(half) * aa.vec)])


def log_su2(q: Rotor) -> AxisAngle:
    v = q.vec
    s = np.linalg.norm(v)
    if s <= AXIS_TOL:
        raise DegenerateRotor("rotor is +-identity; axis undefined")
    a = 2.0 * np.arctan2(s, q.w)
    return AxisAngle(a, tuple(v / s))


def rotor_to_rotation(q: Rotor) -> np.ndarray:
    w, (x, y, z) = q.w, q.v
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def is_rotation(m, tol: float = ORTHO_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    return (m.shape == (3, 3)
            and np.allclose(m.T @ m, np.eye(3), atol=tol)
            and abs(np.linalg.det(m) - 1.0) <= tol)


def _canonical_sign(q: np.ndarray) -> np.ndarray:
    if q[0] > 0:
        return q
    if q[0] < 0:
        return -q
    for c in q[1:]:
        if c != 0:
            return q if c > 0 else -q
    return q


def lift_so3(m) -> Rotor:
    """Canonical rotor covering the rotation matrix ``m``.

    Uses the largest-pivot branch of the trace formula for stability, then
    applies the sign rule: ``w >= 0``, and for ``w == 0`` the first nonzero
    vector component is positive.
    """
    m = np.asarray(m, dtype=float)
    if not is_rotation(m, 1e-8):
        raise InvalidInput("matrix is not a rotation")
    if np.allclose(m, np.eye(3), atol=1e-14):
        raise IdentityRotation("identity has two lifts with no axis")
    tr = np.trace(m)
    diag = np.diag(m)
    k = int(np.argmax([tr, *diag]))
    if k == 0:
        w = 0.5 * np.sqrt(max(1.0 + tr, 0.0))
        q = np.array([w, (m[2, 1] - m[1, 2]) / (4 * w),
                      (m[0, 2] - m[2, 0]) / (4 * w), (m[1, 0] - m[0, 1]) / (4 * w)])
    else:
        i = k - 1
        j, l = (i + 1) % 3, (i + 2) % 3
        vi = 0.5 * np.sqrt(max(1.0 + 2 * m[i, i] - tr, 0.0))
        q = np.empty(4)
        q[0] = (m[l, j] - m[j, l]) / (4 * vi)
        q[1 + i] = vi
        q[1 + j] = (m[j, i] + m[i, j]) / (4 * vi)
        q[1 + l] = (m[l, i] + m[i, l]) / (4 * vi)
    q = q / np.linalg.norm(q)
    # exact zero for a half-turn so the tie-break is deterministic
    if abs(q[0]) < 1e-15:
        q[0] = 0.0
    return Rotor.from_array(_canonical_sign(q))


def rotation_angle(m) -> float:
    """Rotation angle in [0, pi] of an SO(3) matrix, accurate near 0."""
    m = np.asarray(m, dtype=float)
    skew = 0.5 * np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    return float(np.arctan2(np.linalg.norm(skew), 0.5 * (np.trace(m) - 1.0)))


def axis_angle_matrix(angle: float, axis) -> np.ndarray:
    """exp(angle * axis . J) as a 3x3 matrix."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    k = hat(n)
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def hat(x) -> np.ndarray:
    """Matrix of ``y -> x cross y``."""
    x = np.asarray(x, dtype=float)
    return np.array([[0, -x[2], x[1]], [x[2], 0, -x[0]], [-x[1], x[0], 0]])


def half_trace(q: Rotor) -> float:
    # half the trace of the 2x2 SU(2) matrix is the scalar part
    return q.w


def connected_trace(qs: Sequence[Rotor]) -> float:
    """Connected part of the half-trace of a product of 1 to 3 rotors."""
    qs = list(qs)
    t = half_trace
    if len(qs) == 1:
        return t(qs[0])
    if len(qs) == 2:
        h1, h2 = qs
        return t(h1 * h2) - t(h1) * t(h2)
    if len(qs) == 3:
        h1, h2, h3 = qs
        return (t(h1 * h2 * h3)
                - t(h1) * t(h2 * h3) - t(h2) * t(h3 * h1) - t(h3) * t(h1 * h2)
                + 2 * t(h1) * t(h2) * t(h3))
    raise InvalidInput("connected_trace takes 1 to 3 rotors")


def random_rotor(rng: np.random.Generator) -> Rotor:
    """Haar-uniform rotor from a normalized 4D Gaussian."""
    return Rotor.from_array(rng.standard_normal(4))


def random_unit_vector(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    x = rng.standard_normal(dim)
    return x / np.linalg.norm(x)


def rotor_to_json(q: Rotor) -> list[float]:
    return [float(x) for x in q.as_array()]


def rotor_from_json(data) -> Rotor:
    if not isinstance(data, (list, tuple)) or len(data) != 4:
        raise InvalidInput("rotor must be [w, x, y, z]")
    return Rotor.from_array(data)


def axis_angle_to_json(aa: AxisAngle) -> dict:
    return {"angle": aa.angle, "axis": list(aa.axis)}


def axis_angle_from_json(data) -> AxisAngle:
    return AxisAngle(float(data["angle"]), tuple(data["axis"]))
