"""Closure validation, sign fixing, Gram matrix and curvature classification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (ClosureViolated, Degenerate, DegenerateConfiguration,
                     DegenerateRotor, InconsistentDihedral, InvalidGram,
                     InvalidInput, MultipleValidSigns, NoValidSigns,
                     SignMismatch)
from .rotor import Rotor, log_su2, rotation_angle, rotor_from_json, rotor_to_rotation

CLOSURE_TOL = 1e-10
TRIPLE_TOL = 1e-9
DIHEDRAL_TOL = 1e-9
MINOR_TOL = 1e-12
CLASSIFY_EPS = 1e-9

# relabeling that maps the special edge (13) onto (24)
EDGE13_PERM = (1, 0, 3, 2)


class SpecialEdge(Enum):
    EDGE24 = "24"
    EDGE13 = "13"


class CurvatureClass(Enum):
    SPHERICAL = "spherical"
    HYPERBOLIC = "hyperbolic"
    DEGENERATE = "degenerate"

    @property
    def sign(self) -> int:
        return {"spherical": 1, "hyperbolic": -1, "degenerate": 0}[self.value]


@dataclass(frozen=True)
class ClosureConfig:
    holonomies: tuple[Rotor, Rotor, Rotor, Rotor]
    special_edge: SpecialEdge = SpecialEdge.EDGE24
    radius: float = 1.0

    def __post_init__(self):
        hs = tuple(self.holonomies)
        if len(hs) != 4:
            raise InvalidInput("a closure needs exactly four holonomies")
        object.__setattr__(self, "holonomies", hs)
        object.__setattr__(self, "special_edge", SpecialEdge(self.special_edge))
        if not self.radius > 0:
            raise InvalidInput("radius must be positive")

    def canonical(self) -> "ClosureConfig":
        """Equivalent configuration with special edge (24)."""
        if self.special_edge is SpecialEdge.EDGE24:
            return self
        hs = tuple(self.holonomies[p] for p in EDGE13_PERM)
        return ClosureConfig(hs, SpecialEdge.EDGE24, self.radius)

    def conjugated(self, r: Rotor) -> "ClosureConfig":
        hs = tuple(r * h * r.inverse() for h in self.holonomies)
        return ClosureConfig(hs, self.special_edge, self.radius)

    def to_json(self) -> dict:
        return {
            "holonomies": [[float(x) for x in h.as_array()] for h in self.holonomies],
            "special_edge": self.special_edge.value,
            "radius": float(self.radius),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClosureConfig":
        try:
            hs = tuple(rotor_from_json(h) for h in data["holonomies"])
            edge = SpecialEdge(str(data.get("special_edge", "24")))
            radius = float(data.get("radius", 1.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed closure config: {exc}") from exc
        return cls(hs, edge, radius)


@dataclass(frozen=True)
class ClosureReport:
    defect: float
    center_sign: int


@dataclass(frozen=True)
class SignedNormals:
    """Sign-resolved face data in the frame of vertex 4.

    ``angles`` and ``normals`` are the unique parametrization
    ``O_l = exp(angles[l] normals[l] . J)`` with all four transported triple
    products positive.  For a hyperbolic closure the face areas are
    ``2 pi - angles`` (see :meth:`areas`).
    """

    angles: np.ndarray
    normals: np.ndarray
    rotations: np.ndarray
    triples: np.ndarray
    signs: tuple[int, int, int, int] = field(default=(1, 1, 1, 1))

    def areas(self, curvature_sign: int) -> np.ndarray:
        if curvature_sign < 0:
            return 2 * np.pi - self.angles
        return self.angles.copy()


def closure_product(qs: Sequence[Rotor]) -> Rotor:
    h1, h2, h3, h4 = qs
    return h4 * h3 * h2 * h1


def validate_closure(qs: Sequence[Rotor], tol: float = CLOSURE_TOL) -> ClosureReport:
    """Check ``H4 H3 H2 H1 = +-1`` through the SO(3) rotation angle."""
    qs = list(qs)
    if len(qs) != 4:
        raise InvalidInput("validate_closure needs four rotors")
    prod = closure_product(qs)
    defect = rotation_angle(rotor_to_rotation(prod))
    center = 1 if prod.w >= 0 else -1
    if defect > tol:
        raise ClosureViolated(f"closure defect {defect:.3e} exceeds {tol:.1e}")
    return ClosureReport(defect, center)


def triple_products(normals: np.ndarray, rotations: np.ndarray) -> np.ndarray:
    n1, n2, n3, n4 = normals
    o1, o3 = rotations[0], rotations[2]
    return np.array([
        np.cross(n1, n2) @ n3,
        np.cross(n1, n3) @ n4,
        np.cross(n2, n1) @ (o1 @ n4),
        np.cross(n3, n2) @ (o3.T @ n4),
    ])


def fix_signs(cfg: ClosureConfig, closure_tol: float = CLOSURE_TOL) -> SignedNormals:
    """Resolve the 16-fold (a, n) ~ (2 pi - a, -n) ambiguity by convexity."""
    cfg = cfg.canonical()
    validate_closure(cfg.holonomies, closure_tol)
    try:
        logs = [log_su2(h) for h in cfg.holonomies]
    except DegenerateRotor as exc:
        raise DegenerateConfiguration("a holonomy is +-identity") from exc
    rotations = np.array([rotor_to_rotation(h) for h in cfg.holonomies])
    # the lift sign of H only decides which member of each pair log returns;
    # fix a representative with angle <= pi so the result is lift-independent
    base = []
    for aa in logs:
        if aa.angle > np.pi:
            aa = aa.flipped()
        base.append((aa.angle, aa.vec))
    passing = []
    for flips in itertools.product((1, -1), repeat=4):
        angles = np.array([a if f > 0 else 2 * np.pi - a for (a, _), f in zip(base, flips)])
        normals = np.array([f * n for (_, n), f in zip(base, flips)])
        t = triple_products(normals, rotations)
        if np.any(np.abs(t) <= TRIPLE_TOL):
            raise DegenerateConfiguration(
                f"coplanar normals, triple products {np.abs(t).min():.2e}")
        if np.all(t > 0):
            passing.append((angles, normals, t))
    if not passing:
        raise NoValidSigns("no sign assignment makes all triple products positive")
    if len(passing) > 1:
        raise MultipleValidSigns(f"{len(passing)} sign assignments pass")
    angles, normals, t = passing[0]
    signs = tuple(int(np.sign(np.sin(a))) or 1 for a in angles)
    return SignedNormals(angles, normals, rotations, t, signs)


def principal_minors(g: np.ndarray) -> list[tuple[tuple[int, ...], float]]:
    out = []
    for k in (1, 2, 3):
        for idx in itertools.combinations(range(4), k):
            out.append((idx, float(np.linalg.det(g[np.ix_(idx, idx)]))))
    return out


def validate_gram(g: np.ndarray, tol: float = MINOR_TOL) -> np.ndarray:
    """Raise InvalidGram unless every 1x1, 2x2 and 3x3 principal minor is positive."""
    g = np.asarray(g, dtype=float)
    if g.shape != (4, 4) or not np.allclose(g, g.T, atol=1e-12):
        raise InvalidGram("Gram matrix must be symmetric 4x4")
    if not np.allclose(np.diag(g), 1.0, atol=1e-12):
        raise InvalidGram("Gram matrix must have unit diagonal")
    for idx, m in principal_minors(g):
        if m <= tol:
            raise InvalidGram(f"principal minor {idx} = {m:.3e} is not positive")
    return g


def dihedral_24(sn: SignedNormals) -> tuple[float, float]:
    """cos(theta_24) evaluated through O1 and through O3^-1."""
    n2, n4 = sn.normals[1], sn.normals[3]
    o1, o3 = sn.rotations[0], sn.rotations[2]
    return float(n2 @ (o1 @ n4)), float(n2 @ (o3.T @ n4))


def gram(sn: SignedNormals, tol: float = DIHEDRAL_TOL) -> np.ndarray:
    n = sn.normals
    g = n @ n.T
    via_o1, via_o3 = dihedral_24(sn)
    if abs(via_o1 - via_o3) > tol:
        raise InconsistentDihedral(
            f"theta_24 evaluations differ by {abs(via_o1 - via_o3):.3e}")
    g[1, 3] = g[3, 1] = 0.5 * (via_o1 + via_o3)
    np.fill_diagonal(g, 1.0)
    return validate_gram(g)


def gauge_normals(g: np.ndarray) -> np.ndarray:
    """Unit 3-vectors n1, n2, n3 realizing the upper-left 3x3 block of ``g``.

    Gauge: n3 along z, n1 in the xz-plane with positive x, and
    (n1 x n2) . n3 > 0.
    """
    c12, c13, c23 = g[0, 1], g[0, 2], g[1, 2]
    n3 = np.array([0.0, 0.0, 1.0])
    s13 = np.sqrt(max(1.0 - c13 * c13, 0.0))
    if s13 <= 0:
        raise InvalidGram("faces 1 and 3 are parallel")
    n1 = np.array([s13, 0.0, c13])
    x = (c12 - c13 * c23) / s13
    y2 = 1.0 - c23 * c23 - x * x
    if y2 <= 0:
        raise InvalidGram("faces 1, 2, 3 are coplanar")
    # (n1 x n2) . n3 = n1_x n2_y, so the triple product sign is that of y
    n2 = np.array([x, np.sqrt(y2), c23])
    return np.array([n1, n2, n3])


def n4_spatial(normals: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Spatial part of the fourth 4-normal from the dihedral cosines c_4l."""
    n1, n2, n3 = normals[:3]
    t = np.cross(n1, n2) @ n3
    return (g[3, 0] * np.cross(n2, n3) + g[3, 1] * np.cross(n3, n1)
            + g[3, 2] * np.cross(n1, n2)) / t


@dataclass(frozen=True)
class Classification:
    curvature: CurvatureClass
    det: float
    n4_criterion: float
    # hyperbolic holonomies read exp(-a n.J); the triple-positive axis then
    # carries 2 pi - a, so the holonomy axis is opposite to the outward normal
    hyperbolic_flip: bool


def classify(g: np.ndarray, sn: SignedNormals | None = None,
             eps: float = CLASSIFY_EPS) -> Classification:
    g = np.asarray(g, dtype=float)
    det = float(np.linalg.det(g))
    normals = sn.normals[:3] if sn is not None else gauge_normals(g)
    crit = float(1.0 - np.sum(n4_spatial(normals, g) ** 2))
    if abs(det) <= eps:
        return Classification(CurvatureClass.DEGENERATE, det, crit, False)
    if det > eps and crit > eps:
        return Classification(CurvatureClass.SPHERICAL, det, crit, False)
    if det < -eps and crit < -eps:
        return Classification(CurvatureClass.HYPERBOLIC, det, crit, True)
    if abs(crit) <= eps:
        return Classification(CurvatureClass.DEGENERATE, det, crit, False)
    raise SignMismatch(f"det Gram = {det:.3e} but 1 - |N4|^2 = {crit:.3e}")


def require_nondegenerate(c: Classification) -> int:
    if c.curvature is CurvatureClass.DEGENERATE:
        raise Degenerate(f"det Gram = {c.det:.3e} is within tolerance of zero")
    return c.curvature.sign


def gram_for_config(cfg: ClosureConfig) -> np.ndarray:
    """Gram matrix in the configuration's own face labels."""
    g = gram(fix_signs(cfg))
    if cfg.special_edge is SpecialEdge.EDGE13:
        p = np.array(EDGE13_PERM)
        inv = np.argsort(p)
        g = g[np.ix_(inv, inv)]
    return g


def gram_to_json(g: np.ndarray) -> list[float]:
    return [float(x) for x in np.asarray(g).reshape(-1)]


def gram_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.size != 16:
        raise InvalidInput("Gram matrix must have 16 entries")
    return arr.reshape(4, 4)
