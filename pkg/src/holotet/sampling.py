"""Random and canonical closure configurations."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .closure import (ClosureConfig, CurvatureClass, SpecialEdge, classify, fix_signs,
                      gram)
from .errors import HolotetError, InvalidInput, RejectionExhausted
from .forward import closure_from_vertices, oriented
from .rotor import random_rotor, random_unit_vector

REJECT_DET = 1e-6
REJECT_TRIPLE = 1e-4
MAX_ATTEMPTS = 100_000
# smallest |det V| over the product of Euclidean column norms
VERTEX_CONDITION = 0.05
HYPERBOLIC_SPREAD = 1.0


class VertexKind(Enum):
    SPHERICAL = "spherical"
    HYPERBOLIC = "hyperbolic"
    TWO_SHEETED = "two_sheeted"

    @property
    def s(self) -> int:
        return 1 if self is VertexKind.SPHERICAL else -1


@dataclass(frozen=True)
class ForwardSample:
    vertices: np.ndarray
    s: int
    config: ClosureConfig


def is_well_posed(cfg: ClosureConfig, det_min: float = REJECT_DET,
                  triple_min: float = REJECT_TRIPLE) -> bool:
    """Sign fixing succeeds with margin and the Gram matrix is far from flat."""
    try:
        sn = fix_signs(cfg)
        c = classify(gram(sn), sn)
    except HolotetError:
        return False
    return abs(c.det) > det_min and float(np.min(sn.triples)) > triple_min


def random_closure(rng: np.random.Generator, radius: float = 1.0,
                   special_edge: SpecialEdge = SpecialEdge.EDGE24,
                   max_attempts: int = MAX_ATTEMPTS) -> ClosureConfig:
    """Haar-random H1..H3 with H4 fixed by closure, rejecting degenerate draws."""
    for _ in range(max_attempts):
        h1, h2, h3 = (random_rotor(rng) for _ in range(3))
        cfg = ClosureConfig((h1, h2, h3, (h3 * h2 * h1).inverse()), special_edge, radius)
        if is_well_posed(cfg):
            return cfg
    raise RejectionExhausted(f"no admissible closure in {max_attempts} draws")


def spherical_vertices(rng: np.random.Generator) -> np.ndarray:
    V = rng.standard_normal((4, 4))
    return V / np.linalg.norm(V, axis=0)


def hyperboloid_point(rng: np.random.Generator, spread: float) -> np.ndarray:
    r = spread * rng.random()
    return np.array([np.cosh(r), *(np.sinh(r) * random_unit_vector(rng))])


def hyperbolic_vertices(rng: np.random.Generator, spread: float = HYPERBOLIC_SPREAD,
                        mixed: bool = False) -> np.ndarray:
    V = np.column_stack([hyperboloid_point(rng, spread) for _ in range(4)])
    if mixed:
        while True:
            signs = rng.choice([-1.0, 1.0], size=4)
            if len(set(signs)) > 1:
                break
        V = V * signs
    return V


def vertex_condition(V: np.ndarray) -> float:
    return abs(np.linalg.det(V)) / float(np.prod(np.linalg.norm(V, axis=0)))


def _expected_class(kind: VertexKind) -> CurvatureClass:
    return CurvatureClass.SPHERICAL if kind is VertexKind.SPHERICAL else CurvatureClass.HYPERBOLIC


def forward_sample(rng: np.random.Generator, kind: VertexKind, radius: float = 1.0,
                   max_attempts: int = MAX_ATTEMPTS) -> ForwardSample:
    """Random vertex set of the given kind and the holonomies it produces.

    Draws with nearly dependent vertices or a nearly flat Gram matrix are
    rejected, since their reconstruction is ill-conditioned.
    """
    for _ in range(max_attempts):
        if kind is VertexKind.SPHERICAL:
            V = spherical_vertices(rng)
        else:
            V = hyperbolic_vertices(rng, mixed=kind is VertexKind.TWO_SHEETED)
        if vertex_condition(V) < VERTEX_CONDITION:
            continue
        try:
            cfg = closure_from_vertices(V, kind.s, radius)
            sn = fix_signs(cfg)
            c = classify(gram(sn), sn)
        except HolotetError:
            continue
        if (c.curvature is _expected_class(kind) and abs(c.det) > REJECT_DET
                and float(np.min(sn.triples)) > REJECT_TRIPLE):
            return ForwardSample(oriented(V), kind.s, cfg)
    raise RejectionExhausted(f"no admissible {kind.value} sample in {max_attempts} draws")


def octant_vertices() -> np.ndarray:
    """Vertices e1..e4 of the unit 3-sphere: the all-right-angled tetrahedron."""
    return np.eye(4)


def octant_config(radius: float = 1.0) -> ClosureConfig:
    return closure_from_vertices(octant_vertices(), 1, radius)


def regular_flat_tetrahedron(edge: float = 1.0) -> np.ndarray:
    """(4, 3) vertices of a regular Euclidean tetrahedron centred at 0."""
    P = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return P * edge / (2 * np.sqrt(2))


def check_seed(seed) -> int:
    try:
        seed = int(seed)
    except (TypeError, ValueError) as exc:
        raise InvalidInput("seed must be an integer") from exc
    if seed < 0:
        raise InvalidInput("seed must be non-negative")
    return seed
