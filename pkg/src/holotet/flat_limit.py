"""Flat limit: a Euclidean tetrahedron seen through holonomies at radius r.

Face area vectors ``a_l`` of a flat tetrahedron are turned into holonomies
``exp(a_l . tau / r^2)`` for the first three faces; the fourth is fixed by
closure, which the flat data satisfy only to leading order.  Reconstructing
at radius r and comparing edge lengths with the flat ones exposes the
curvature correction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .closure import ClosureConfig
from .errors import Degenerate, DegenerateConfiguration, InvalidInput
from .reconstruction import EDGES, reconstruct
from .rotor import AxisAngle, exp_su2

DEFAULT_RADII = (10.0, 20.0, 40.0, 80.0)
# holonomy angles below this carry no usable axis information
IDENTITY_ANGLE = 1e-6


def flat_area_vectors(P) -> np.ndarray:
    """Outward area vectors (rows) of the faces opposite each vertex."""
    P = np.asarray(P, dtype=float).reshape(4, 3)
    centre = P.mean(axis=0)
    out = np.zeros((4, 3))
    for l in range(4):
        a, b, c = P[[k for k in range(4) if k != l]]
        n = 0.5 * np.cross(b - a, c - a)
        if n @ (a - centre) < 0:
            n = -n
        out[l] = n
    if np.min(np.linalg.norm(out, axis=1)) <= 1e-12:
        raise InvalidInput("flat tetrahedron is degenerate")
    return out


def flat_edge_lengths(P) -> np.ndarray:
    P = np.asarray(P, dtype=float).reshape(4, 3)
    return np.array([np.linalg.norm(P[i] - P[j]) for i, j in EDGES])


def curved_config(area_vectors, radius: float) -> ClosureConfig:
    A = np.asarray(area_vectors, dtype=float).reshape(4, 3)
    hs = [exp_su2(AxisAngle(np.linalg.norm(a) / radius**2, tuple(a / np.linalg.norm(a))))
          for a in A[:3]]
    h4 = (hs[2] * hs[1] * hs[0]).inverse()
    return ClosureConfig((*hs, h4), radius=radius)


@dataclass(frozen=True)
class FlatLimitPoint:
    radius: float
    curvature_class: str
    edge_lengths: tuple[float, ...]
    error: float

    def to_json(self) -> dict:
        return {"radius": self.radius, "class": self.curvature_class,
                "edge_lengths": list(self.edge_lengths), "error": self.error}


@dataclass(frozen=True)
class FlatLimitStudy:
    flat_edges: tuple[float, ...]
    points: tuple[FlatLimitPoint, ...]

    @property
    def slope(self) -> float:
        r = [p.radius for p in self.points]
        e = [p.error for p in self.points]
        return float(np.polyfit(np.log(r), np.log(e), 1)[0])

    def to_json(self) -> dict:
        return {"flat_edges": list(self.flat_edges),
                "points": [p.to_json() for p in self.points], "slope": self.slope}


def flat_limit_study(P, radii: Sequence[float] = DEFAULT_RADII,
                     reference=None) -> FlatLimitStudy:
    """Max edge-length error against ``reference`` (default: edges of P)."""
    A = flat_area_vectors(P)
    ref = flat_edge_lengths(P) if reference is None else np.asarray(reference, dtype=float)
    points = []
    for r in radii:
        try:
            tet = reconstruct(curved_config(A, r))
        except DegenerateConfiguration as exc:
            if np.max(np.linalg.norm(A, axis=1)) / r**2 > IDENTITY_ANGLE:
                raise
            # holonomies are numerically the identity: det Gram is zero
            raise Degenerate(f"radius {r:g}: holonomies indistinguishable from identity") from exc
        e = np.array(tet.edge_lengths)
        points.append(FlatLimitPoint(float(r), tet.curvature_class, tuple(e.tolist()),
                                     float(np.max(np.abs(e - ref)))))
    return FlatLimitStudy(tuple(ref.tolist()), tuple(points))
