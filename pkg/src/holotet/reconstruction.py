"""Embedded tetrahedron from a classified Gram matrix.

The model space is the unit sphere ``g(x, x) = 1`` with ``g = diag(1,1,1,1)``
or the two-sheeted hyperboloid ``g(x, x) = -1`` with ``g = diag(-1,1,1,1)``.
Lengths and areas are scaled by the curvature radius only when reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .closure import (EDGE13_PERM, ClosureConfig, Classification, CurvatureClass,
                      SpecialEdge, classify, fix_signs, gauge_normals, gram,
                      n4_spatial, require_nondegenerate, validate_gram)
from .errors import (AreaMismatch, CoincidentVertices, InvalidInput,
                     ReconstructionFailure, SingularNormalMatrix,
                     TimelikeViolation, VertexFigureDegenerate)

GRAM_TOL = 1e-9
SINGULAR_TOL = 1e-10
COINCIDENT_TOL = 1e-9
VERTEX_FIGURE_TOL = 1e-9
EDGE_CHECK_TOL = 1e-8
AREA_TOL = 1e-8

EDGES = tuple(combinations(range(4), 2))

# faces meeting at each vertex, ordered so that det[V_k, N_a, N_b, N_c] > 0
VERTEX_TRIPLES = {3: (0, 1, 2), 1: (0, 2, 3), 2: (1, 0, 3), 0: (2, 1, 3)}


def metric(s: int) -> np.ndarray:
    return np.diag([float(s), 1.0, 1.0, 1.0])


def inner(x, y, s: int) -> float:
    return float(s * x[0] * y[0] + x[1:] @ y[1:])


@dataclass(frozen=True)
class EdgeLength:
    pair: tuple[int, int]
    length: float
    generalized: bool = False
    degenerate: bool = False
    diagnostic: float | None = None

    def to_json(self) -> dict:
        return {
            "pair": [self.pair[0] + 1, self.pair[1] + 1],
            "length": None if np.isinf(self.length) else float(self.length),
            "generalized": self.generalized,
            "degenerate": self.degenerate,
            "diagnostic": None if self.diagnostic is None else float(self.diagnostic),
        }


@dataclass(frozen=True)
class FaceData:
    face_angles: np.ndarray       # [face, vertex], nan on the diagonal
    areas: np.ndarray             # unit-radius areas
    two_sheeted: np.ndarray       # per face
    edge_cosines: np.ndarray      # per edge in EDGES order, from the dual law


@dataclass(frozen=True)
class CurvedTetrahedron:
    s: int
    N: np.ndarray
    V: np.ndarray
    sheets: tuple[str, ...] | None
    edges: tuple[EdgeLength, ...]
    areas: np.ndarray
    gram: np.ndarray
    face_angles: np.ndarray
    radius: float = 1.0
    hyperbolic_flip: bool = False
    classification: Classification | None = field(default=None, compare=False)

    @property
    def dihedral(self) -> np.ndarray:
        return np.arccos(np.clip(self.gram, -1.0, 1.0))

    @property
    def two_sheeted(self) -> bool:
        return self.sheets is not None and len(set(self.sheets)) > 1

    @property
    def curvature_class(self) -> str:
        if self.s > 0:
            return "spherical"
        return "two_sheeted" if self.two_sheeted else "hyperbolic"

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges])

    def relabeled(self, perm) -> "CurvedTetrahedron":
        """Tetrahedron whose label ``i`` is this one's label ``perm[i]``."""
        p = np.asarray(perm)
        edges = []
        for a, b in EDGES:
            pa, pb = sorted((p[a], p[b]))
            e = next(e for e in self.edges if e.pair == (pa, pb))
            edges.append(replace(e, pair=(a, b)))
        return replace(
            self, N=self.N[:, p], V=self.V[:, p],
            sheets=None if self.sheets is None else tuple(self.sheets[i] for i in p),
            edges=tuple(edges), areas=self.areas[p],
            gram=self.gram[np.ix_(p, p)], face_angles=self.face_angles[np.ix_(p, p)])

    def to_json(self) -> dict:
        fa = [[None if i == j else float(self.face_angles[i, j]) for j in range(4)]
              for i in range(4)]
        return {
            "metric_sign": int(self.s),
            "radius": float(self.radius),
            "class": self.curvature_class,
            "hyperbolic_flip": bool(self.hyperbolic_flip),
            "N": self.N.tolist(),
            "V": self.V.tolist(),
            "sheets": None if self.sheets is None else list(self.sheets),
            "edges": [e.to_json() for e in self.edges],
            "areas": (self.areas * self.radius**2).tolist(),
            "dihedral": self.dihedral.tolist(),
            "face_angles": fa,
        }


def _vertex_matrix(N: np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Columns W_l with g(N_m, W_l) = -delta_lm, and their g-norms."""
    g = metric(s)
    if abs(np.linalg.det(N)) <= SINGULAR_TOL:
        raise SingularNormalMatrix(f"|det N| = {abs(np.linalg.det(N)):.3e}")
    W = -g @ np.linalg.inv(N).T
    q = np.einsum("il,ij,jl->l", W, g, W)
    return W, q


def vertices(N: np.ndarray, s: int) -> tuple[np.ndarray, tuple[str, ...] | None]:
    N = np.asarray(N, dtype=float)
    W, q = _vertex_matrix(N, s)
    if s < 0 and np.any(q >= 0):
        raise TimelikeViolation("a vertex 4-vector is not timelike")
    V = W / np.sqrt(np.abs(q))
    for l in range(4):
        # the vertex sits on the inner side of the one face it does not touch
        if inner(N[:, l], V[:, l], s) > 0:
            V[:, l] = -V[:, l]
    sheets = None
    if s < 0:
        sheets = tuple("upper" if V[0, l] > 0 else "lower" for l in range(4))
    return V, sheets


def vertex_triples(N: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Oriented triple products of the face normals at each vertex."""
    out = np.empty(4)
    for k, (a, b, c) in VERTEX_TRIPLES.items():
        out[k] = np.linalg.det(np.column_stack([V[:, k], N[:, a], N[:, b], N[:, c]]))
    return out


def normals4(G: np.ndarray, s: int, tol: float = GRAM_TOL) -> np.ndarray:
    """4-normals (as columns) in the vertex-4 gauge."""
    G = np.asarray(G, dtype=float)
    n = gauge_normals(G)
    sp = n4_spatial(n, G)
    t2 = s * (1.0 - sp @ sp)
    if t2 <= 0:
        raise ReconstructionFailure("no real time component for the fourth normal")
    chosen = []
    for sign in (1.0, -1.0):
        N = np.zeros((4, 4))
        N[1:, :3] = n.T
        N[0, 3] = sign * np.sqrt(t2)
        N[1:, 3] = sp
        try:
            V, _ = vertices(N, s)
        except (SingularNormalMatrix, TimelikeViolation):
            continue
        if np.all(vertex_triples(N, V) > 0):
            chosen.append(N)
    if len(chosen) != 1:
        raise ReconstructionFailure(
            f"{len(chosen)} orientations of the fourth normal pass the triple test")
    N = chosen[0]
    recon = N.T @ metric(s) @ N
    # rounding in N^T g N scales with the Euclidean size of N_4
    scale = max(1.0, float(N[:, 3] @ N[:, 3]))
    if np.max(np.abs(recon - G)) > tol * scale:
        raise ReconstructionFailure("normals do not reproduce the Gram matrix")
    return N


def edge_lengths(V: np.ndarray, s: int) -> tuple[EdgeLength, ...]:
    out = []
    for a, b in EDGES:
        c = inner(V[:, a], V[:, b], s)
        if s > 0:
            d = float(np.arccos(np.clip(c, -1.0, 1.0)))
            if d < COINCIDENT_TOL:
                raise CoincidentVertices(f"vertices {a + 1} and {b + 1} coincide")
            out.append(EdgeLength((a, b), d, degenerate=bool(np.pi - d < COINCIDENT_TOL)))
        elif c < 0:
            d = float(np.arccosh(max(-c, 1.0)))
            if d < COINCIDENT_TOL:
                raise CoincidentVertices(f"vertices {a + 1} and {b + 1} coincide")
            out.append(EdgeLength((a, b), d))
        else:
            diag = float(np.arccosh(max(c, 1.0)))
            out.append(EdgeLength((a, b), float("inf"), generalized=True, diagnostic=diag))
    return tuple(out)


def same_sheet_from_gram(G: np.ndarray) -> np.ndarray:
    """For hyperbolic Gram matrices, ``g(V_l, V_m)`` has the sign of
    ``(Gram^-1)_lm`` up to a positive factor; negative means same sheet."""
    return np.linalg.inv(G) < 0


def check_vertex_figures(G: np.ndarray) -> None:
    """Each vertex figure needs internal dihedral angles summing above pi."""
    internal = np.pi - np.arccos(np.clip(np.asarray(G, dtype=float), -1.0, 1.0))
    # at vertex k the edge (k, j) carries the dihedral of the two other faces
    for k in range(4):
        total = 0.0
        for j in range(4):
            if j == k:
                continue
            p, q = [i for i in range(4) if i not in (k, j)]
            total += internal[p, q]
        if total <= np.pi + VERTEX_FIGURE_TOL:
            raise VertexFigureDegenerate(
                f"internal dihedral angles at vertex {k + 1} sum to {total:.12f}")


def face_data(G: np.ndarray, s: int) -> FaceData:
    G = np.asarray(G, dtype=float)
    theta = np.arccos(np.clip(G, -1.0, 1.0))
    check_vertex_figures(G)
    alpha = np.full((4, 4), np.nan)
    for l in range(4):
        for k in range(4):
            if k == l:
                continue
            # vertex figure at k: the side for face l is opposite the corner
            # of edge (k, l), whose two faces are the complement of {k, l}
            p, q = [i for i in range(4) if i not in (k, l)]
            c_opp = -G[p, q]
            # the two other corners are the edges of face l through k
            e1, e2 = [j for j in range(4) if j not in (k, l)]
            a1 = [i for i in range(4) if i not in (k, e1)]
            a2 = [i for i in range(4) if i not in (k, e2)]
            cA, sA = -G[a1[0], a1[1]], np.sin(theta[a1[0], a1[1]])
            cB, sB = -G[a2[0], a2[1]], np.sin(theta[a2[0], a2[1]])
            alpha[l, k] = np.arccos(np.clip((c_opp + cA * cB) / (sA * sB), -1.0, 1.0))
    two = np.zeros(4, dtype=bool)
    if s < 0:
        same = same_sheet_from_gram(G)
        for l in range(4):
            f = [k for k in range(4) if k != l]
            two[l] = not all(same[a, b] for a, b in combinations(f, 2))
    areas = np.empty(4)
    for l in range(4):
        sigma = np.nansum(alpha[l])
        if s > 0:
            areas[l] = sigma - np.pi
        elif two[l]:
            areas[l] = 3 * np.pi - sigma
        else:
            areas[l] = np.pi - sigma
    cosines = np.empty(len(EDGES))
    for i, (a, b) in enumerate(EDGES):
        l = min(set(range(4)) - {a, b})
        m = ({0, 1, 2, 3} - {a, b, l}).pop()
        ca, cb, cm = np.cos(alpha[l, a]), np.cos(alpha[l, b]), np.cos(alpha[l, m])
        cosines[i] = (cm + ca * cb) / (np.sin(alpha[l, a]) * np.sin(alpha[l, b]))
    return FaceData(alpha, areas, two, cosines)


def edge_condition(fd: FaceData) -> np.ndarray:
    """Amplification of angle errors into each dual-law edge cosine."""
    out = np.empty(len(EDGES))
    for i, (a, b) in enumerate(EDGES):
        l = min(set(range(4)) - {a, b})
        sa, sb = np.sin(fd.face_angles[l, a]), np.sin(fd.face_angles[l, b])
        out[i] = max(1.0, abs(fd.edge_cosines[i])) / min(1.0, sa * sb) ** 2
    return out


def check_edges(edges, fd: FaceData, s: int, V: np.ndarray,
                tol: float = EDGE_CHECK_TOL) -> float:
    """Compare dual-law edge cosines with those of the vertex vectors.

    The tolerance is scaled by the conditioning of the dual law, which
    degrades as face angles approach 0 or pi.  Returns the largest raw
    discrepancy.
    """
    worst = 0.0
    cond = edge_condition(fd)
    for e, c, k in zip(edges, fd.edge_cosines, cond):
        a, b = e.pair
        # the dual law returns cos d (sphere) or -g(V_a, V_b) (hyperboloid)
        expected = inner(V[:, a], V[:, b], s) * (1 if s > 0 else -1)
        diff = abs(c - expected)
        worst = max(worst, diff)
        if diff > tol * k:
            raise ReconstructionFailure(
                f"edge {a + 1}{b + 1}: cosine law {c:.12f} vs vertices {expected:.12f}")
    return worst


def _assemble(G: np.ndarray, cls, radius: float) -> tuple[CurvedTetrahedron, FaceData]:
    s = require_nondegenerate(cls)
    fd = face_data(G, s)
    N = normals4(G, s)
    V, sheets = vertices(N, s)
    edges = edge_lengths(V, s)
    check_edges(edges, fd, s, V)
    scaled = tuple(replace(e, length=e.length * radius) for e in edges)
    tet = CurvedTetrahedron(s, N, V, sheets, scaled, fd.areas, G, fd.face_angles,
                            radius=radius, hyperbolic_flip=cls.hyperbolic_flip,
                            classification=cls)
    return tet, fd


def tetrahedron_from_gram(G, radius: float = 1.0) -> CurvedTetrahedron:
    """Curved tetrahedron with the given Gram matrix of dihedral cosines.

    Vertex-figure degeneracy is reported before the principal-minor test,
    since an ideal vertex shows up as a vanishing 3x3 minor.
    """
    G = np.asarray(G, dtype=float)
    if G.shape != (4, 4) or not np.allclose(G, G.T, atol=1e-12):
        raise InvalidInput("Gram matrix must be symmetric 4x4")
    check_vertex_figures(G)
    G = validate_gram(G)
    return _assemble(G, classify(G), radius)[0]


def reconstruct(cfg: ClosureConfig, area_tol: float = AREA_TOL) -> CurvedTetrahedron:
    canon = cfg.canonical()
    sn = fix_signs(canon)
    G = gram(sn)
    cls = classify(G, sn)
    tet, fd = _assemble(G, cls, cfg.radius)
    err = np.max(np.abs(fd.areas - sn.areas(tet.s)))
    if err > area_tol:
        raise AreaMismatch(f"reconstructed areas differ from holonomy areas by {err:.3e}")
    if cfg.special_edge is SpecialEdge.EDGE13:
        tet = tet.relabeled(EDGE13_PERM)
    return tet


def lemma_minors(G: np.ndarray) -> np.ndarray:
    """Principal 3x3 cofactors m_l, computed as (Gram^-1)_ll * det Gram."""
    G = np.asarray(G, dtype=float)
    return np.diag(np.linalg.inv(G)) * np.linalg.det(G)
