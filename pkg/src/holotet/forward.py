"""Forward holonomy model: parallel transport along tetrahedron edges.

Transport from ``V1`` to ``V2`` is the composition of two g-reflections,
first in ``V1`` and then in ``V1 + V2``.  It fixes the g-orthogonal
complement of ``span{V1, V2}`` and maps ``V1`` to ``V2``.  When the two
points sit on different sheets of the hyperboloid the same formula continues
the geodesic through infinity: the velocity is carried over and vectors
normal to the geodesic plane keep their side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closure import ClosureConfig, SpecialEdge, fix_signs, validate_closure
from .errors import (DegenerateGeodesic, InvalidInput, Misaligned, NotIncident,
                     SpacelikePlane)
from .reconstruction import CurvedTetrahedron, inner, metric, reconstruct
from .rotor import Rotor, axis_angle_matrix, lift_so3, rotation_angle

GEODESIC_TOL = 1e-12
ALIGN_TOL = 1e-6

# simple paths as vertex sequences (1-based), read in travel order
SIMPLE_PATHS = {
    1: (4, 2, 3, 4),
    2: (4, 3, 1, 4),
    3: (4, 1, 2, 4),
    4: (4, 2, 1, 3, 2, 4),
}

# traversal sense of each face, as used by the simple paths
FACE_CYCLES = {1: (4, 2, 3), 2: (4, 3, 1), 3: (4, 1, 2), 4: (2, 1, 3)}


@dataclass(frozen=True)
class TangentTransport:
    source: int
    target: int
    matrix: np.ndarray
    cross_sheet: bool = False

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)


def _reflection(u: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.eye(4) - 2.0 * np.outer(u, u @ g) / (u @ g @ u)


def transport_matrix(v_from, v_to, s: int) -> np.ndarray:
    v1 = np.asarray(v_from, dtype=float)
    v2 = np.asarray(v_to, dtype=float)
    g = metric(s)
    c = v1 @ g @ v2
    if s < 0 and c * c - 1.0 < -1e-12:
        raise SpacelikePlane("the plane through both points is not timelike")
    if abs(s + c) <= GEODESIC_TOL:
        raise DegenerateGeodesic("endpoints are antipodal; the geodesic is not unique")
    return _reflection(v1 + v2, g) @ _reflection(v1, g)


def transport_along_geodesic(v_from, v_to, s: int, source: int = -1,
                             target: int = -1) -> TangentTransport:
    v1 = np.asarray(v_from, dtype=float)
    v2 = np.asarray(v_to, dtype=float)
    cross = bool(s < 0 and np.sign(v1[0]) != np.sign(v2[0]))
    return TangentTransport(source, target, transport_matrix(v1, v2, s), cross)


def vertex_frame(V: np.ndarray, k: int, s: int) -> np.ndarray:
    """Positively oriented g-orthonormal tangent frame at vertex ``k`` (0-based).

    Built by Gram-Schmidt from the edge directions toward the other vertices
    in index order; the last vector is flipped if needed so that
    ``det[V_k, E] > 0``.
    """
    g = metric(s)
    vk = V[:, k]
    basis = []
    for j in range(4):
        if j == k:
            continue
        d = V[:, j] - s * (V[:, j] @ g @ vk) * vk
        for t in basis:
            d = d - (d @ g @ t) * t
        d = d / np.sqrt(d @ g @ d)
        basis.append(d)
    E = np.column_stack(basis)
    if np.linalg.det(np.column_stack([vk, E])) < 0:
        E[:, 2] = -E[:, 2]
    return E


def to_frame(E: np.ndarray, x, s: int) -> np.ndarray:
    return E.T @ metric(s) @ np.asarray(x, dtype=float)


def path_transport(V: np.ndarray, path, s: int) -> np.ndarray:
    """4x4 transport along a vertex path given with 1-based labels."""
    t = np.eye(4)
    for a, b in zip(path[:-1], path[1:]):
        t = transport_matrix(V[:, a - 1], V[:, b - 1], s) @ t
    return t


def nearest_rotation(m: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(m)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return r


def restrict(T: np.ndarray, E: np.ndarray, s: int) -> np.ndarray:
    """Matrix of a tangent map in the frame ``E``, projected onto SO(3).

    The projection only removes rounding drift, which grows with the
    hyperbolic distances involved.
    """
    return nearest_rotation(E.T @ metric(s) @ T @ E)


def recentered(V: np.ndarray, s: int) -> np.ndarray:
    """Hyperbolic vertices moved by an isometry so their projective centroid
    sits at (1, 0, 0, 0).

    Holonomies in vertex-built frames are unchanged; the point is to keep
    coordinates small, since rounding in the hyperboloid model grows with
    the squared Euclidean size of the vectors.
    """
    if s > 0:
        return V
    g = metric(s)
    w = (V * np.sign(V[0])).sum(axis=1)
    c = w / np.sqrt(-(w @ g @ w))
    e0 = np.array([1.0, 0.0, 0.0, 0.0])
    if np.allclose(c, e0):
        return V
    boost = _reflection(c + e0, g) @ _reflection(c, g)
    return boost @ V


def simple_path_holonomies(tet: CurvedTetrahedron, frame: np.ndarray | None = None) -> np.ndarray:
    """The four face holonomies along the simple paths, at vertex 4."""
    s = tet.s
    V = tet.V if frame is not None else recentered(tet.V, s)
    E = vertex_frame(V, 3, s) if frame is None else frame
    return np.array([restrict(path_transport(V, SIMPLE_PATHS[l], s), E, s)
                     for l in (1, 2, 3, 4)])


def face_holonomy(tet: CurvedTetrahedron, face: int, base: int,
                  frame: np.ndarray | None = None) -> np.ndarray:
    """exp(+-a n.J) of face ``face`` at vertex ``base`` (both 1-based)."""
    if face == base or not (1 <= face <= 4 and 1 <= base <= 4):
        raise NotIncident(f"vertex {base} is not on face {face}")
    s = tet.s
    E = vertex_frame(tet.V, base - 1, s) if frame is None else frame
    n = to_frame(E, tet.N[:, face - 1], s)
    a = tet.areas[face - 1]
    if not 0 < a < 2 * np.pi:
        raise InvalidInput("face area must lie in (0, 2pi)")
    return axis_angle_matrix(s * a, n)


def kink_holonomy(tet: CurvedTetrahedron, face: int, base: int,
                  frame: np.ndarray | None = None) -> np.ndarray:
    """Face holonomy assembled from the turning at each corner.

    Each corner with internal angle alpha turns the frame by
    -(pi - alpha) about the outward face normal; transport along the sides
    contributes nothing in a frame adapted to the face.
    """
    if face == base:
        raise NotIncident(f"vertex {base} is not on face {face}")
    s = tet.s
    E = vertex_frame(tet.V, base - 1, s) if frame is None else frame
    n = to_frame(E, tet.N[:, face - 1], s)
    total = np.eye(3)
    for k in range(4):
        if k == face - 1:
            continue
        total = axis_angle_matrix(-(np.pi - tet.face_angles[face - 1, k]), n) @ total
    return total


def loop_holonomy(tet: CurvedTetrahedron, face: int, base: int,
                  frame: np.ndarray | None = None) -> np.ndarray:
    """Transport once around face ``face`` starting at ``base``, in the
    traversal sense induced by the simple paths."""
    if face == base:
        raise NotIncident(f"vertex {base} is not on face {face}")
    cycle = FACE_CYCLES[face]
    i = cycle.index(base)
    order = cycle[i:] + cycle[:i]
    path = order + (order[0],)
    s = tet.s
    E = vertex_frame(tet.V, base - 1, s) if frame is None else frame
    return restrict(path_transport(tet.V, path, s), E, s)


def _frame_from_pair(n3, n1) -> np.ndarray:
    e1 = np.asarray(n3, dtype=float)
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.asarray(n1, dtype=float) - (np.asarray(n1) @ e1) * e1
    norm = np.linalg.norm(e2)
    if norm < 1e-12:
        raise Misaligned("normals 1 and 3 are parallel")
    e2 = e2 / norm
    return np.column_stack([e1, e2, np.cross(e1, e2)])


@dataclass(frozen=True)
class Alignment:
    rotation: np.ndarray
    residual: float


def align_by_conjugation(normals_a, normals_b, tol: float = ALIGN_TOL) -> Alignment:
    """Rotation taking n3 and n1 of set ``a`` onto those of set ``b``."""
    a = np.asarray(normals_a, dtype=float)
    b = np.asarray(normals_b, dtype=float)
    R = _frame_from_pair(b[2], b[0]) @ _frame_from_pair(a[2], a[0]).T
    residual = float(max(np.linalg.norm(R @ a[i] - b[i]) for i in range(len(a))))
    if residual > tol:
        raise Misaligned(f"alignment residual {residual:.3e} exceeds {tol:.1e}")
    return Alignment(R, residual)


def lift_closure(rotations, special_edge=SpecialEdge.EDGE24, radius: float = 1.0) -> ClosureConfig:
    """Rotors for four SO(3) holonomies, with H4 chosen so the SU(2) product is +1."""
    hs = [lift_so3(o) for o in rotations]
    prod = hs[3] * hs[2] * hs[1] * hs[0]
    if prod.w < 0:
        hs[3] = -hs[3]
    return ClosureConfig(tuple(hs), special_edge, radius)


def oriented(V) -> np.ndarray:
    """Mirror a negatively oriented vertex set by flipping its last coordinate."""
    V = np.array(V, dtype=float)
    if np.linalg.det(V) < 0:
        V[3, :] = -V[3, :]
    return V


def closure_from_vertices(V, s: int, radius: float = 1.0, orient: bool = True) -> ClosureConfig:
    """Simple-path holonomies of the tetrahedron with vertex columns ``V``.

    With ``orient`` set, a negatively oriented vertex set is mirrored
    (last coordinate flipped) so that the labels follow the right-handed
    convention the sign fixing assumes.
    """
    V = np.array(V, dtype=float)
    if V.shape != (4, 4):
        raise InvalidInput("vertex matrix must be 4x4 with vertices as columns")
    if np.linalg.det(V) < 0 and not orient:
        raise InvalidInput("vertices are negatively oriented")
    V = oriented(V)
    E = vertex_frame(V, 3, s)
    rots = [restrict(path_transport(V, SIMPLE_PATHS[l], s), E, s) for l in (1, 2, 3, 4)]
    return lift_closure(rots, radius=radius)


def normals_from_vertices(V, s: int) -> np.ndarray:
    """Outward unit 4-normals (columns) of the faces of a vertex set."""
    V = np.asarray(V, dtype=float)
    g = metric(s)
    N = -(g @ np.linalg.inv(V).T)
    for l in range(4):
        N[:, l] /= np.sqrt(abs(N[:, l] @ g @ N[:, l]))
    return N


@dataclass(frozen=True)
class RoundtripReport:
    max_angle_error: float
    max_area_error: float
    aligned: bool
    curvature_class: str
    residual: float = 0.0
    forward_closure_defect: float = 0.0

    def to_json(self) -> dict:
        return {
            "max_angle_error": float(self.max_angle_error),
            "max_area_error": float(self.max_area_error),
            "aligned": bool(self.aligned),
            "class": self.curvature_class,
        }


def roundtrip_check(cfg: ClosureConfig, align_tol: float = ALIGN_TOL) -> RoundtripReport:
    """Reconstruct, recompute the simple-path holonomies and compare."""
    canon = cfg.canonical()
    tet = reconstruct(canon)
    sn_in = fix_signs(canon)
    forward = simple_path_holonomies(tet)
    # the recomputed product telescopes to the identity exactly, so its
    # defect is pure rounding; it is reported rather than enforced
    fwd_cfg = lift_closure(forward, radius=canon.radius)
    defect = validate_closure(fwd_cfg.holonomies, np.inf).defect
    sn_out = fix_signs(fwd_cfg, np.inf)
    try:
        al = align_by_conjugation(sn_out.normals, sn_in.normals, align_tol)
        aligned = True
    except Misaligned:
        al = align_by_conjugation(sn_out.normals, sn_in.normals, np.inf)
        aligned = False
    R = al.rotation
    angle_err = max(rotation_angle(R @ f @ R.T @ o.T)
                    for f, o in zip(forward, sn_in.rotations))
    expected = sn_in.areas(tet.s)
    area_err = max(np.max(np.abs(tet.areas - expected)),
                   np.max(np.abs(sn_out.areas(tet.s) - expected)))
    return RoundtripReport(float(angle_err), float(area_err), aligned,
                           tet.curvature_class, al.residual, float(defect))
